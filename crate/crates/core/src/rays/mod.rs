//! Ray families over lazily generated hosts.

mod certify;
mod host;
mod spine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{disjoint_paths, MultiDigraph, PathSeq, VertexId};

pub use certify::{Certification, PairPattern};
pub use host::{ConstantHost, HostGenerator, RayedHost, Truncation};
pub use spine::{build_spine, build_spine_with, Schedule, Spine};

/// 1-based index of a ray in its family.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RayIndex(pub u32);

impl fmt::Debug for RayIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

impl fmt::Display for RayIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl RayIndex {
    /// The contracted vertex standing for this ray.
    pub fn vertex(self) -> VertexId {
        VertexId(self.0 as u64)
    }

    pub fn from_vertex(v: VertexId) -> Self {
        RayIndex(v.0 as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Out,
    In,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Out => Orientation::In,
            Orientation::In => Orientation::Out,
        }
    }
}

/// A finite prefix of a ray. `vertices[0]` is the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayPrefix {
    pub index: RayIndex,
    pub orientation: Orientation,
    pub vertices: Vec<VertexId>,
}

impl RayPrefix {
    pub fn root(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn tip(&self) -> VertexId {
        *self.vertices.last().expect("ray prefixes are nonempty")
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// The suffix rooted at `v`.
    pub fn tail(&self, v: VertexId) -> Result<RayPrefix> {
        let p = self.position(v).ok_or(Error::VertexNotOnRay(v))?;
        Ok(RayPrefix {
            vertices: self.vertices[p..].to_vec(),
            ..self.clone()
        })
    }

    pub fn is_prefix_of(&self, other: &RayPrefix) -> bool {
        self.index == other.index
            && self.orientation == other.orientation
            && other.vertices.starts_with(&self.vertices)
    }

    /// The directed path between positions `a <= b`, in edge direction.
    pub fn segment(&self, g: &MultiDigraph, a: usize, b: usize) -> Result<PathSeq> {
        let mut vs = self.vertices[a..=b].to_vec();
        if self.orientation == Orientation::In {
            vs.reverse();
        }
        PathSeq::from_vertices(g, vs)
    }

    /// Checks that consecutive vertices are joined in `g` in the ray's direction.
    pub fn check_in(&self, g: &MultiDigraph) -> std::result::Result<(), String> {
        if self.vertices.is_empty() {
            return Err("empty ray prefix".into());
        }
        let set: BTreeSet<_> = self.vertices.iter().collect();
        if set.len() != self.vertices.len() {
            return Err(format!("ray {} repeats a vertex", self.index));
        }
        for w in self.vertices.windows(2) {
            let (t, h) = match self.orientation {
                Orientation::Out => (w[0], w[1]),
                Orientation::In => (w[1], w[0]),
            };
            if g.find_edge(t, h).is_none() {
                return Err(format!("ray {} lacks edge {t}->{h}", self.index));
            }
        }
        Ok(())
    }
}

/// `x` plus every ray vertex (on rays in `j_set`) at or before some vertex of `x`.
pub fn down_closure(
    x: &BTreeSet<VertexId>,
    j_set: &BTreeSet<RayIndex>,
    t: &Truncation,
) -> BTreeSet<VertexId> {
    let mut out = x.clone();
    let mut reach: BTreeMap<RayIndex, usize> = BTreeMap::new();
    for v in x {
        if let Some((r, p)) = t.ray_position(*v) {
            if j_set.contains(&r) {
                let e = reach.entry(r).or_insert(0);
                *e = (*e).max(p);
            }
        }
    }
    for (r, p) in reach {
        out.extend(t.rays[&r].vertices[..=p].iter().copied());
    }
    out
}

/// Finite-scale evidence that two rays are equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub i: RayIndex,
    pub j: RayIndex,
    pub forward: Vec<PathSeq>,
    pub backward: Vec<PathSeq>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Witness(EquivalenceWitness),
    Insufficient { forward: usize, backward: usize },
}

/// Looks for `k` disjoint paths each way between two rays of a truncation.
pub fn check_equivalence(
    host: &RayedHost,
    i: RayIndex,
    j: RayIndex,
    k: usize,
    depth: usize,
) -> Result<Equivalence> {
    let t = host.truncate(depth);
    let ri = t.ray(i)?.vertices.iter().copied().collect::<BTreeSet<_>>();
    let rj = t.ray(j)?.vertices.iter().copied().collect::<BTreeSet<_>>();
    if i == j {
        return Err(Error::InvalidInput(
            "equivalence needs two distinct rays".into(),
        ));
    }
    if k == 0 {
        return Ok(Equivalence::Witness(EquivalenceWitness {
            i,
            j,
            forward: Vec::new(),
            backward: Vec::new(),
            depth,
        }));
    }
    let none = BTreeSet::new();
    let forward = disjoint_paths(&t.graph, &ri, &rj, &none, k)?;
    let backward = disjoint_paths(&t.graph, &rj, &ri, &none, k)?;
    if forward.len() >= k && backward.len() >= k {
        Ok(Equivalence::Witness(EquivalenceWitness {
            i,
            j,
            forward,
            backward,
            depth,
        }))
    } else {
        Ok(Equivalence::Insufficient {
            forward: forward.len(),
            backward: backward.len(),
        })
    }
}

/// Checks an equivalence witness against a graph that contains both rays.
pub fn validate_witness(
    w: &EquivalenceWitness,
    g: &MultiDigraph,
    ri: &BTreeSet<VertexId>,
    rj: &BTreeSet<VertexId>,
) -> std::result::Result<(), String> {
    for (paths, from, to) in [(&w.forward, ri, rj), (&w.backward, rj, ri)] {
        let mut used = BTreeSet::new();
        for p in paths {
            p.check_in(g)?;
            if !from.contains(&p.first()) || !to.contains(&p.last()) {
                return Err("witness path has wrong endpoints".into());
            }
            for v in &p.vertices {
                if !used.insert(*v) {
                    return Err("witness paths intersect".into());
                }
            }
        }
    }
    Ok(())
}
