//! Contracting each ray of a family to a vertex and reading spine segments as edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiDigraph, Multiplicity, PathSeq};
use crate::rays::{Certification, Orientation, RayIndex, RayedHost, Spine, Truncation};

/// How the quotient of unbounded edges was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "tier")]
pub enum Provenance {
    /// Only host-certified repeating pairs count as unbounded.
    Certified,
    /// Uncertified pairs seen at least `threshold` times also count; approximate.
    Threshold { threshold: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dinf {
    pub graph: MultiDigraph,
    pub provenance: Provenance,
    /// True when some kept edge rests on the threshold rather than a certificate.
    pub approximate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionResult {
    pub orientation: Orientation,
    pub j_set: BTreeSet<RayIndex>,
    /// One edge per spine segment between distinct rays of `j_set`.
    pub dj: MultiDigraph,
    /// Host path behind each edge of `dj`, oriented as in the host.
    pub sigma: BTreeMap<EdgeId, PathSeq>,
    /// Segment count per ordered pair, upgraded when certified.
    pub multiplicity: BTreeMap<(RayIndex, RayIndex), Multiplicity>,
    /// Segments that left a ray and came back to it.
    pub loops: Vec<(RayIndex, PathSeq)>,
    /// Rays certified (and observed) to reach unboundedly many rays.
    pub unbounded_out: BTreeSet<RayIndex>,
    pub unbounded_in: BTreeSet<RayIndex>,
    pub dinf: Dinf,
    pub depth: usize,
}

impl ContractionResult {
    /// Distinct out-neighbours (or in-neighbours) of `j` in `dj`.
    pub fn neighbours(&self, j: RayIndex, direction: Orientation) -> BTreeSet<RayIndex> {
        let nb = match direction {
            Orientation::Out => self.dj.out_neighbors(j.vertex()),
            Orientation::In => self.dj.in_neighbors(j.vertex()),
        };
        nb.into_iter().map(RayIndex::from_vertex).collect()
    }

    /// Edges of `dj` from `u` to `v`, in id order.
    pub fn edges_between(&self, u: RayIndex, v: RayIndex) -> Vec<EdgeId> {
        self.dj
            .edges()
            .filter(|e| e.tail == u.vertex() && e.head == v.vertex())
            .map(|e| e.id)
            .collect()
    }

    /// `dj` with parallel edges merged and pair multiplicities attached.
    pub fn collapsed(&self) -> MultiDigraph {
        let mut g = MultiDigraph::new();
        for v in self.dj.vertices() {
            g.add_vertex(*v);
        }
        for (&(u, v), m) in &self.multiplicity {
            g.add_edge_mult(u.vertex(), v.vertex(), *m)
                .expect("pair endpoints are vertices");
        }
        g
    }
}

/// Contracts the rays of `j_set` along `spine`, using the host's certification.
pub fn contract(
    host: &RayedHost,
    spine: &Spine,
    j_set: &BTreeSet<RayIndex>,
    threshold: Option<u64>,
) -> Result<ContractionResult> {
    contract_with(host, spine, j_set, &host.certification, threshold)
}

/// As [`contract`], with an explicit certification (for re-contracting
/// structures whose repetition is guaranteed by construction).
pub fn contract_with(
    host: &RayedHost,
    spine: &Spine,
    j_set: &BTreeSet<RayIndex>,
    certification: &Certification,
    threshold: Option<u64>,
) -> Result<ContractionResult> {
    let t = host.truncate(spine.depth);
    let (t, cert) = if spine.orientation == Orientation::In {
        (std::sync::Arc::new(t.reversed()), certification.reversed())
    } else {
        (t, certification.clone())
    };
    let mut c = contract_out(&t, &spine.root_first_path(), j_set, &cert, threshold)?;
    if spine.orientation == Orientation::In {
        c = reverse_result(c);
    }
    c.depth = spine.depth;
    Ok(c)
}

fn contract_out(
    t: &Truncation,
    s: &PathSeq,
    j_set: &BTreeSet<RayIndex>,
    cert: &Certification,
    threshold: Option<u64>,
) -> Result<ContractionResult> {
    let visits: Vec<(usize, RayIndex)> = s
        .vertices
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            t.ray_position(*v)
                .filter(|(r, _)| j_set.contains(r))
                .map(|(r, _)| (i, r))
        })
        .collect();
    if visits.is_empty() {
        return Err(Error::SpineVisitsNoRay);
    }
    let mut dj = MultiDigraph::new();
    for j in j_set {
        dj.add_vertex(j.vertex());
    }
    let mut sigma = BTreeMap::new();
    let mut counts: BTreeMap<(RayIndex, RayIndex), u64> = BTreeMap::new();
    let mut loops = Vec::new();
    for w in visits.windows(2) {
        let ((a, ra), (b, rb)) = (w[0], w[1]);
        let seg = s.slice(a, b);
        if ra == rb {
            let along = b == a + 1 && {
                let (pa, pb) = (
                    t.ray_position(s.vertices[a]).unwrap().1,
                    t.ray_position(s.vertices[b]).unwrap().1,
                );
                pb == pa + 1
            };
            if !along {
                loops.push((ra, seg));
            }
            continue;
        }
        let id = dj.add_edge(ra.vertex(), rb.vertex())?;
        sigma.insert(id, seg);
        *counts.entry((ra, rb)).or_default() += 1;
    }
    let exact = cert.exact;
    let multiplicity: BTreeMap<_, _> = counts
        .iter()
        .map(|(&(u, v), &m)| {
            let mult = if exact && cert.certifies(u, v) {
                Multiplicity::CertifiedUnbounded
            } else {
                Multiplicity::Finite(m)
            };
            ((u, v), mult)
        })
        .collect();
    let observed_out: BTreeSet<RayIndex> = counts.keys().map(|p| p.0).collect();
    let observed_in: BTreeSet<RayIndex> = counts.keys().map(|p| p.1).collect();
    let unbounded_out = if exact {
        cert.fan_out.intersection(&observed_out).copied().collect()
    } else {
        BTreeSet::new()
    };
    let unbounded_in = if exact {
        cert.fan_in.intersection(&observed_in).copied().collect()
    } else {
        BTreeSet::new()
    };
    let mut c = ContractionResult {
        orientation: Orientation::Out,
        j_set: j_set.clone(),
        dj,
        sigma,
        multiplicity,
        loops,
        unbounded_out,
        unbounded_in,
        dinf: Dinf {
            graph: MultiDigraph::new(),
            provenance: Provenance::Certified,
            approximate: false,
        },
        depth: t.depth,
    };
    c.dinf = d_infinity(&c, threshold);
    Ok(c)
}

fn reverse_result(c: ContractionResult) -> ContractionResult {
    ContractionResult {
        orientation: Orientation::In,
        dj: c.dj.reverse(),
        sigma: c
            .sigma
            .into_iter()
            .map(|(e, p)| (e, p.reversed()))
            .collect(),
        multiplicity: c
            .multiplicity
            .into_iter()
            .map(|((u, v), m)| ((v, u), m))
            .collect(),
        loops: c
            .loops
            .into_iter()
            .map(|(r, p)| (r, p.reversed()))
            .collect(),
        unbounded_out: c.unbounded_in,
        unbounded_in: c.unbounded_out,
        dinf: Dinf {
            graph: c.dinf.graph.reverse(),
            ..c.dinf
        },
        ..c
    }
}

/// The simple digraph of unbounded pairs: certified ones, plus (when a
/// threshold is given) uncertified pairs seen at least `threshold` times.
pub fn d_infinity(c: &ContractionResult, threshold: Option<u64>) -> Dinf {
    let mut g = MultiDigraph::new();
    for v in c.dj.vertices() {
        g.add_vertex(*v);
    }
    let mut approximate = false;
    for (&(u, v), m) in &c.multiplicity {
        let keep = match (m, threshold) {
            (Multiplicity::CertifiedUnbounded, _) => true,
            (Multiplicity::Finite(k), Some(t)) if *k >= t => {
                approximate = true;
                true
            }
            _ => false,
        };
        if keep {
            g.add_edge_mult(u.vertex(), v.vertex(), *m)
                .expect("pair endpoints are vertices");
        }
    }
    let provenance = match threshold {
        None => Provenance::Certified,
        Some(threshold) => Provenance::Threshold { threshold },
    };
    Dinf {
        graph: g,
        provenance,
        approximate,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCensus {
    pub ray: RayIndex,
    /// Distinct neighbours in the chosen direction.
    pub distinct: usize,
    /// Segments in the chosen direction.
    pub segments: usize,
    pub unbounded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dichotomy {
    InfiniteDegreeVertex(RayIndex),
    CrossEdge(RayIndex, RayIndex),
    Undetermined(Vec<DegreeCensus>),
}

/// Either a vertex of `j_finite` with unbounded degree in the given
/// direction, or a quotient edge leaving (entering) `j_finite`.
///
/// Degree is unbounded if certified, or if at least `threshold` distinct
/// neighbours are seen (when a threshold is given).
pub fn degree_dichotomy(
    c: &ContractionResult,
    j_finite: &BTreeSet<RayIndex>,
    direction: Orientation,
    threshold: Option<u64>,
) -> Dichotomy {
    let census: Vec<DegreeCensus> = j_finite
        .iter()
        .map(|&j| {
            let distinct = c.neighbours(j, direction).len();
            let segments =
                c.dj.edges()
                    .filter(|e| match direction {
                        Orientation::Out => e.tail == j.vertex() && e.head != j.vertex(),
                        Orientation::In => e.head == j.vertex() && e.tail != j.vertex(),
                    })
                    .count();
            let certified = match direction {
                Orientation::Out => c.unbounded_out.contains(&j),
                Orientation::In => c.unbounded_in.contains(&j),
            };
            let unbounded = certified || threshold.is_some_and(|t| distinct as u64 >= t);
            DegreeCensus {
                ray: j,
                distinct,
                segments,
                unbounded,
            }
        })
        .collect();
    if let Some(d) = census.iter().find(|d| d.unbounded) {
        return Dichotomy::InfiniteDegreeVertex(d.ray);
    }
    for e in c.dinf.graph.edges() {
        let (u, v) = (RayIndex::from_vertex(e.tail), RayIndex::from_vertex(e.head));
        let hit = match direction {
            Orientation::Out => j_finite.contains(&u) && !j_finite.contains(&v),
            Orientation::In => j_finite.contains(&v) && !j_finite.contains(&u),
        };
        if hit {
            return Dichotomy::CrossEdge(u, v);
        }
    }
    Dichotomy::Undetermined(census)
}

#[cfg(test)]
mod tests;
