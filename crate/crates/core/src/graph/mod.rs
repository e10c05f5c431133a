//! Finite multidigraph kernel.
//!
//! Vertices and edges are identified by opaque tokens minted by whoever builds
//! the graph. Nothing here assumes identifiers are contiguous.

mod dense;
mod flow;
mod scc;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dense::Dense;
pub use flow::{disjoint_paths, max_disjoint_count};
pub use scc::{strong_components, StrongComponents};
pub use search::{reachable_from, shortest_path, PathQuery};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edge multiplicity: a finite positive count or a certified-unbounded tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u64),
    CertifiedUnbounded,
}

impl Multiplicity {
    pub fn one() -> Self {
        Multiplicity::Finite(1)
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Multiplicity::CertifiedUnbounded)
    }

    /// True when the multiplicity reaches `threshold` (unbounded always does).
    pub fn reaches(&self, threshold: u64) -> bool {
        match self {
            Multiplicity::Finite(m) => *m >= threshold,
            Multiplicity::CertifiedUnbounded => true,
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(m) => s.serialize_u64(*m),
            Multiplicity::CertifiedUnbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(0) => Err(serde::de::Error::custom("multiplicity must be >= 1")),
            Raw::Count(m) => Ok(Multiplicity::Finite(m)),
            Raw::Tag(t) if t == "inf" => Ok(Multiplicity::CertifiedUnbounded),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("bad multiplicity {t:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    #[serde(rename = "mult")]
    pub multiplicity: Multiplicity,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A finite directed multigraph. Parallel edges and loops are allowed.
#[derive(Clone, Default)]
pub struct MultiDigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    dense: OnceLock<Arc<Dense>>,
}

impl PartialEq for MultiDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for MultiDigraph {}

impl fmt::Debug for MultiDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiDigraph")
            .field("vertices", &self.vertices)
            .field("edges", &self.edges.values().collect::<Vec<_>>())
            .finish()
    }
}

impl MultiDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.dense = OnceLock::new();
        self.vertices.insert(v);
    }

    /// Adds an edge with a caller-chosen id. Both endpoints must already exist.
    pub fn add_edge_with_id(
        &mut self,
        id: EdgeId,
        tail: VertexId,
        head: VertexId,
        multiplicity: Multiplicity,
    ) -> Result<EdgeId> {
        if !self.vertices.contains(&tail) {
            return Err(Error::UnknownVertex(tail));
        }
        if !self.vertices.contains(&head) {
            return Err(Error::UnknownVertex(head));
        }
        if let Multiplicity::Finite(0) = multiplicity {
            return Err(Error::InvalidInput(
                "finite multiplicity must be >= 1".into(),
            ));
        }
        if self.edges.contains_key(&id) {
            return Err(Error::DuplicateEdge(id));
        }
        self.dense = OnceLock::new();
        self.edges.insert(
            id,
            Edge {
                id,
                tail,
                head,
                multiplicity,
            },
        );
        Ok(id)
    }

    /// Adds an edge with the next free id (one past the current maximum).
    pub fn add_edge(&mut self, tail: VertexId, head: VertexId) -> Result<EdgeId> {
        self.add_edge_mult(tail, head, Multiplicity::one())
    }

    pub fn add_edge_mult(
        &mut self,
        tail: VertexId,
        head: VertexId,
        multiplicity: Multiplicity,
    ) -> Result<EdgeId> {
        let id = self.next_edge_id();
        self.add_edge_with_id(id, tail, head, multiplicity)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.dense = OnceLock::new();
        self.edges.remove(&id)
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Smallest-id edge from `tail` to `head`, if any.
    pub fn find_edge(&self, tail: VertexId, head: VertexId) -> Option<EdgeId> {
        self.dense().edge_between(tail, head)
    }

    /// Cached dense adjacency view used by the traversal algorithms.
    pub fn dense(&self) -> Arc<Dense> {
        self.dense
            .get_or_init(|| Arc::new(Dense::build(self)))
            .clone()
    }

    /// Every edge `(u,v)` becomes `(v,u)`; ids and multiplicities are kept.
    pub fn reverse(&self) -> MultiDigraph {
        let mut out = MultiDigraph {
            vertices: self.vertices.clone(),
            ..Default::default()
        };
        for e in self.edges.values() {
            out.edges.insert(
                e.id,
                Edge {
                    tail: e.head,
                    head: e.tail,
                    ..*e
                },
            );
        }
        out
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> MultiDigraph {
        let mut out = MultiDigraph::new();
        for v in self.vertices.intersection(keep) {
            out.vertices.insert(*v);
        }
        for e in self.edges.values() {
            if keep.contains(&e.tail) && keep.contains(&e.head) {
                out.edges.insert(e.id, *e);
            }
        }
        out
    }

    /// Subgraph with the given vertices removed.
    pub fn without(&self, removed: &BTreeSet<VertexId>) -> MultiDigraph {
        let keep: BTreeSet<_> = self.vertices.difference(removed).copied().collect();
        self.induced(&keep)
    }

    /// True if every vertex and edge of `self` is present (by id, with the same endpoints) in `host`.
    pub fn is_subgraph_of(&self, host: &MultiDigraph) -> bool {
        self.vertices.is_subset(&host.vertices)
            && self.edges.values().all(|e| {
                host.edge(e.id)
                    .is_some_and(|h| h.tail == e.tail && h.head == e.head)
            })
    }

    /// Out-neighbors of `v` ignoring loops, ascending and deduplicated.
    pub fn out_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.dense().out_neighbors_of(v)
    }

    pub fn in_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.dense().in_neighbors_of(v)
    }

    /// Union of two graphs; shared edge ids must agree on endpoints.
    pub fn union(&self, other: &MultiDigraph) -> Result<MultiDigraph> {
        let mut out = self.clone();
        out.dense = OnceLock::new();
        out.vertices.extend(other.vertices.iter().copied());
        for e in other.edges.values() {
            match out.edges.get(&e.id) {
                Some(x) if x.tail != e.tail || x.head != e.head => {
                    return Err(Error::DuplicateEdge(e.id));
                }
                Some(_) => {}
                None => {
                    out.edges.insert(e.id, *e);
                }
            }
        }
        Ok(out)
    }
}

/// Turns an undirected edge list into a digraph with both orientations per edge.
///
/// Edge `k` of the input yields ids `2k` (as given) and `2k+1` (flipped).
pub fn bidirect(
    vertices: impl IntoIterator<Item = VertexId>,
    undirected: &[(VertexId, VertexId)],
) -> Result<MultiDigraph> {
    let mut g = MultiDigraph::new();
    for v in vertices {
        g.add_vertex(v);
    }
    for (k, &(a, b)) in undirected.iter().enumerate() {
        let k = k as u64;
        g.add_edge_with_id(EdgeId(2 * k), a, b, Multiplicity::one())?;
        g.add_edge_with_id(EdgeId(2 * k + 1), b, a, Multiplicity::one())?;
    }
    Ok(g)
}

/// A simple directed path, given by its vertices and the edges joining them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathSeq {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl PathSeq {
    pub fn single(v: VertexId) -> Self {
        PathSeq {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    /// Builds a path from a vertex walk, picking the smallest-id edge for each step.
    pub fn from_vertices(g: &MultiDigraph, vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("empty path".into()));
        }
        let mut edges = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            let e = g
                .find_edge(w[0], w[1])
                .ok_or(Error::MissingEdge(w[0], w[1]))?;
            edges.push(e);
        }
        let p = PathSeq { vertices, edges };
        if !p.is_simple() {
            return Err(Error::InvalidInput("path repeats a vertex".into()));
        }
        Ok(p)
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        let set: BTreeSet<_> = self.vertices.iter().collect();
        set.len() == self.vertices.len()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    pub fn interior(&self) -> &[VertexId] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    /// Checks that every listed edge exists in `g` and joins consecutive vertices.
    pub fn check_in(&self, g: &MultiDigraph) -> std::result::Result<(), String> {
        if self.vertices.is_empty() {
            return Err("empty path".into());
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return Err("edge count does not match vertex count".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            let Some(edge) = g.edge(*e) else {
                return Err(format!("edge {e} missing"));
            };
            if edge.tail != self.vertices[i] || edge.head != self.vertices[i + 1] {
                return Err(format!("edge {e} does not join step {i}"));
            }
        }
        if !self.is_simple() {
            return Err("path repeats a vertex".into());
        }
        Ok(())
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &PathSeq) -> Result<PathSeq> {
        if self.last() != other.first() {
            return Err(Error::InvalidInput(format!(
                "cannot join path ending at {} to path starting at {}",
                self.last(),
                other.first()
            )));
        }
        let mut out = self.clone();
        out.vertices.extend_from_slice(&other.vertices[1..]);
        out.edges.extend_from_slice(&other.edges);
        if !out.is_simple() {
            return Err(Error::InvalidInput(
                "concatenation is not a simple path".into(),
            ));
        }
        Ok(out)
    }

    /// The reverse walk (valid in the reversed graph, where edge ids are kept).
    pub fn reversed(&self) -> PathSeq {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let mut edges = self.edges.clone();
        edges.reverse();
        PathSeq { vertices, edges }
    }

    /// Subpath between vertex positions `from..=to`.
    pub fn slice(&self, from: usize, to: usize) -> PathSeq {
        PathSeq {
            vertices: self.vertices[from..=to].to_vec(),
            edges: self.edges[from..to].to_vec(),
        }
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn is_prefix_of(&self, other: &PathSeq) -> bool {
        other.vertices.starts_with(&self.vertices) && other.edges.starts_with(&self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn reverse_single_edge() {
        let mut g = MultiDigraph::new();
        g.add_vertex(v(1));
        g.add_vertex(v(2));
        let e = g.add_edge(v(1), v(2)).unwrap();
        let r = g.reverse();
        assert_eq!(r.edge(e).unwrap().tail, v(2));
        assert_eq!(r.edge(e).unwrap().head, v(1));
        assert_eq!(r.reverse(), g);
    }

    #[test]
    fn reverse_edgeless_is_identity() {
        let mut g = MultiDigraph::new();
        for i in 0..4 {
            g.add_vertex(v(i));
        }
        assert_eq!(g.reverse(), g);
    }

    #[test]
    fn bidirect_counts() {
        let g = bidirect([v(0), v(1)], &[(v(0), v(1))]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.find_edge(v(0), v(1)).is_some());
        assert!(g.find_edge(v(1), v(0)).is_some());

        let path = bidirect((0..4).map(v), &[(v(0), v(1)), (v(1), v(2)), (v(2), v(3))]).unwrap();
        assert_eq!(path.edge_count(), 6);
        let mut flipped = path.reverse();
        // reversal of a bidirected graph only swaps the paired ids
        for k in 0..3u64 {
            let a = *flipped.edge(EdgeId(2 * k)).unwrap();
            let b = *flipped.edge(EdgeId(2 * k + 1)).unwrap();
            flipped.remove_edge(a.id);
            flipped.remove_edge(b.id);
            flipped
                .add_edge_with_id(a.id, b.tail, b.head, b.multiplicity)
                .unwrap();
            flipped
                .add_edge_with_id(b.id, a.tail, a.head, a.multiplicity)
                .unwrap();
        }
        assert_eq!(flipped, path);
    }

    #[test]
    fn rejects_edge_with_unknown_endpoint() {
        let mut g = MultiDigraph::new();
        g.add_vertex(v(0));
        assert!(matches!(
            g.add_edge(v(0), v(9)),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn parallel_edges_and_loops_are_stored() {
        let mut g = MultiDigraph::new();
        g.add_vertex(v(0));
        g.add_vertex(v(1));
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(1), v(1)).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.out_neighbors(v(0)), vec![v(1)]);
        assert_eq!(g.out_neighbors(v(1)), Vec::<VertexId>::new());
    }

    #[test]
    fn multiplicity_json() {
        let e = Edge {
            id: EdgeId(3),
            tail: v(1),
            head: v(2),
            multiplicity: Multiplicity::CertifiedUnbounded,
        };
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"id":3,"tail":1,"head":2,"mult":"inf"}"#);
        let back: Edge = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<Multiplicity>("0").is_err());
    }

    #[test]
    fn path_concat_and_slice() {
        let g = bidirect((0..4).map(v), &[(v(0), v(1)), (v(1), v(2)), (v(2), v(3))]).unwrap();
        let p = PathSeq::from_vertices(&g, vec![v(0), v(1)]).unwrap();
        let q = PathSeq::from_vertices(&g, vec![v(1), v(2), v(3)]).unwrap();
        let pq = p.concat(&q).unwrap();
        assert_eq!(pq.vertices, vec![v(0), v(1), v(2), v(3)]);
        assert!(pq.check_in(&g).is_ok());
        assert_eq!(pq.slice(1, 2).vertices, vec![v(1), v(2)]);
        assert!(PathSeq::from_vertices(&g, vec![v(0), v(1), v(0)]).is_err());
    }
}
