use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::RayIndex;

/// A family of ordered ray pairs that a host promises to join again at every level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "kebab-case")]
pub enum PairPattern {
    Pair {
        from: RayIndex,
        to: RayIndex,
    },
    /// `k -> k+1` whenever `k+1 <= limit`.
    Up {
        limit: Option<u32>,
    },
    /// `k+1 -> k` whenever `k+1 <= limit`.
    Down {
        limit: Option<u32>,
    },
    /// `k -> 1` for `2 <= k <= limit`.
    IntoFirst {
        limit: Option<u32>,
    },
    /// `1 -> k` for `2 <= k <= limit`.
    OutOfFirst {
        limit: Option<u32>,
    },
}

impl PairPattern {
    pub fn matches(&self, from: RayIndex, to: RayIndex) -> bool {
        let within = |limit: &Option<u32>, k: u32| limit.is_none_or(|l| k <= l);
        let (a, b) = (from.0, to.0);
        match self {
            PairPattern::Pair { from: f, to: t } => *f == from && *t == to,
            PairPattern::Up { limit } => b == a + 1 && within(limit, b),
            PairPattern::Down { limit } => a == b + 1 && within(limit, a),
            PairPattern::IntoFirst { limit } => b == 1 && a >= 2 && within(limit, a),
            PairPattern::OutOfFirst { limit } => a == 1 && b >= 2 && within(limit, b),
        }
    }

    pub fn reversed(&self) -> PairPattern {
        match *self {
            PairPattern::Pair { from, to } => PairPattern::Pair { from: to, to: from },
            PairPattern::Up { limit } => PairPattern::Down { limit },
            PairPattern::Down { limit } => PairPattern::Up { limit },
            PairPattern::IntoFirst { limit } => PairPattern::OutOfFirst { limit },
            PairPattern::OutOfFirst { limit } => PairPattern::IntoFirst { limit },
        }
    }
}

/// Declarations a catalog host makes about what recurs at every depth.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    /// Ordered ray pairs joined by fresh off-ray paths at every level.
    pub patterns: Vec<PairPattern>,
    /// Rays joined by outgoing paths to unboundedly many distinct rays.
    pub fan_out: BTreeSet<RayIndex>,
    /// Same, incoming.
    pub fan_in: BTreeSet<RayIndex>,
    /// False for hosts that certify nothing and fall back to thresholds.
    pub exact: bool,
}

impl Certification {
    pub fn exact(patterns: Vec<PairPattern>) -> Self {
        Certification {
            patterns,
            exact: true,
            ..Default::default()
        }
    }

    pub fn certifies(&self, from: RayIndex, to: RayIndex) -> bool {
        self.patterns.iter().any(|p| p.matches(from, to))
    }

    pub fn reversed(&self) -> Certification {
        Certification {
            patterns: self.patterns.iter().map(PairPattern::reversed).collect(),
            fan_out: self.fan_in.clone(),
            fan_in: self.fan_out.clone(),
            exact: self.exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_matching() {
        let r = RayIndex;
        assert!(PairPattern::Up { limit: None }.matches(r(4), r(5)));
        assert!(!PairPattern::Up { limit: Some(4) }.matches(r(4), r(5)));
        assert!(PairPattern::Down { limit: Some(5) }.matches(r(5), r(4)));
        assert!(PairPattern::IntoFirst { limit: None }.matches(r(9), r(1)));
        assert!(!PairPattern::IntoFirst { limit: None }.matches(r(1), r(1)));
        let c = Certification::exact(vec![PairPattern::OutOfFirst { limit: Some(3) }]);
        assert!(c.certifies(r(1), r(3)));
        assert!(c.reversed().certifies(r(3), r(1)));
        assert!(!c.certifies(r(1), r(4)));
    }

    #[test]
    fn json_shape() {
        let p = PairPattern::Pair {
            from: RayIndex(2),
            to: RayIndex(1),
        };
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"pattern":"pair","from":2,"to":1}"#
        );
    }
}
