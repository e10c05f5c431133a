use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    reachable_from, shortest_path, strong_components, MultiDigraph, PathQuery, PathSeq, VertexId,
};

/// What [`escape_ray`] found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Escape {
    /// A path of the requested length meeting every strong component in one
    /// contiguous piece.
    OutPath { path: PathSeq },
    /// A path of the requested length into a vertex that many vertices reach.
    InRayPrefix { path: PathSeq },
    /// The busiest vertex of a wide, shallow in-arborescence.
    InfiniteInDegreeVertex { vertex: VertexId, in_degree: usize },
}

/// Looks for an out-path of `length` vertices that leaves each strong
/// component through an exit edge, else for a vertex reached by at least
/// `length` vertices.
///
/// Components containing a vertex of `open` are treated as having an exit
/// beyond the truncation, so paths never start where they would be trapped.
pub fn escape_ray(
    g: &MultiDigraph,
    open: &BTreeSet<VertexId>,
    length: usize,
    depth: usize,
) -> Result<Escape> {
    if length == 0 {
        return Err(Error::InvalidInput("escape length must be positive".into()));
    }
    let sc = strong_components(g);
    let mut has_exit = vec![false; sc.components.len()];
    let mut has_entry = vec![false; sc.components.len()];
    for &(a, b) in &sc.condensation {
        has_exit[a] = true;
        has_entry[b] = true;
    }
    for v in open {
        if let Some(&c) = sc.component_of.get(v) {
            has_exit[c] = true;
        }
    }
    let trapped: Vec<VertexId> = (0..sc.components.len())
        .filter(|&c| !has_exit[c])
        .flat_map(|c| sc.components[c].iter().copied())
        .collect();
    let doomed = reachable_from(&g.reverse(), &trapped);
    let mut best: Option<PathSeq> = None;
    for (c, comp) in sc.components.iter().enumerate() {
        if has_entry[c] {
            continue;
        }
        let Some(&x) = comp.iter().find(|v| !doomed.contains(v)) else {
            continue;
        };
        let p = leave_components(g, &sc.component_of, x, length);
        if best
            .as_ref()
            .is_none_or(|b| p.vertices.len() > b.vertices.len())
        {
            best = Some(p);
        }
        if best.as_ref().is_some_and(|b| b.vertices.len() >= length) {
            break;
        }
    }
    if let Some(p) = best.filter(|p| p.vertices.len() >= length) {
        return Ok(Escape::OutPath {
            path: p.slice(0, length - 1),
        });
    }
    in_evidence(g, length).ok_or_else(|| Error::obstruction("escape ray", depth))
}

/// Starting at `x`, repeatedly crosses the current component to an exit edge.
fn leave_components(
    g: &MultiDigraph,
    comp_of: &BTreeMap<VertexId, usize>,
    x: VertexId,
    length: usize,
) -> PathSeq {
    let mut path = PathSeq::single(x);
    while path.vertices.len() < length {
        let here = path.last();
        let c = comp_of[&here];
        let exit = g
            .edges()
            .filter(|e| comp_of[&e.tail] == c && comp_of[&e.head] != c)
            .min_by_key(|e| (e.tail != here, e.id));
        let Some(exit) = exit else { break };
        let inside = |v: VertexId| comp_of[&v] == c;
        let (from, to) = (BTreeSet::from([here]), BTreeSet::from([exit.tail]));
        let none = BTreeSet::new();
        let q = shortest_path(g, &PathQuery::new(&from, &to, &none).with_interior(&inside))
            .expect("strong components are strongly connected");
        let step = PathSeq {
            vertices: vec![exit.tail, exit.head],
            edges: vec![exit.id],
        };
        path = path
            .concat(&q)
            .and_then(|p| p.concat(&step))
            .expect("consecutive pieces share endpoints");
    }
    path
}

/// A vertex reached by at least `length` others, reported through its
/// breadth-first in-arborescence.
fn in_evidence(g: &MultiDigraph, length: usize) -> Option<Escape> {
    let rev = g.reverse();
    let root = g
        .vertices()
        .iter()
        .copied()
        .find(|v| reachable_from(&rev, &[*v]).len() > length)?;
    let mut parent: BTreeMap<VertexId, (VertexId, crate::graph::EdgeId)> = BTreeMap::new();
    let mut depth = BTreeMap::from([(root, 0usize)]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for e in g.edges().filter(|e| e.head == v) {
            if !depth.contains_key(&e.tail) {
                depth.insert(e.tail, depth[&v] + 1);
                parent.insert(e.tail, (v, e.id));
                queue.push_back(e.tail);
            }
        }
    }
    let (&deep, &d) = depth
        .iter()
        .max_by_key(|(v, d)| (**d, std::cmp::Reverse(**v)))?;
    if d + 1 >= length {
        let mut vertices = vec![deep];
        let mut edges = Vec::new();
        let mut v = deep;
        while let Some(&(up, e)) = parent.get(&v) {
            vertices.push(up);
            edges.push(e);
            v = up;
        }
        let path = PathSeq { vertices, edges };
        let cut = path.vertices.len() - length;
        return Some(Escape::InRayPrefix {
            path: path.slice(cut, path.vertices.len() - 1),
        });
    }
    let mut children: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (up, _) in parent.values() {
        *children.entry(*up).or_default() += 1;
    }
    let (&vertex, &in_degree) = children
        .iter()
        .max_by_key(|(v, k)| (**k, std::cmp::Reverse(**v)))?;
    Some(Escape::InfiniteInDegreeVertex { vertex, in_degree })
}
