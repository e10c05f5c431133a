use std::collections::{BTreeMap, HashMap};

use super::{EdgeId, MultiDigraph, VertexId};

/// Index-based adjacency view of a [`MultiDigraph`].
///
/// Loops are dropped and parallel edges collapsed; neighbor lists are sorted
/// by vertex id so traversals are deterministic.
#[derive(Debug)]
pub struct Dense {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    first_edge: HashMap<(usize, usize), EdgeId>,
}

impl Dense {
    pub(crate) fn build(g: &MultiDigraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().iter().copied().collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut first_edge: HashMap<(usize, usize), EdgeId> = HashMap::new();
        let mut out_sets: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); ids.len()];
        let mut in_sets: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); ids.len()];
        for e in g.edges() {
            let t = index[&e.tail];
            let h = index[&e.head];
            first_edge.entry((t, h)).or_insert(e.id);
            if t != h {
                out_sets[t].insert(h, ());
                in_sets[h].insert(t, ());
            }
        }
        // vertex ids are sorted, so index order equals id order
        let out = out_sets
            .into_iter()
            .map(|s| s.into_keys().collect())
            .collect();
        let inc = in_sets
            .into_iter()
            .map(|s| s.into_keys().collect())
            .collect();
        Dense {
            ids,
            index,
            out,
            inc,
            first_edge,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> VertexId {
        self.ids[i]
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn out(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn inc(&self, i: usize) -> &[usize] {
        &self.inc[i]
    }

    pub fn edge_between(&self, tail: VertexId, head: VertexId) -> Option<EdgeId> {
        let t = self.index_of(tail)?;
        let h = self.index_of(head)?;
        self.first_edge.get(&(t, h)).copied()
    }

    pub(crate) fn edge_idx(&self, t: usize, h: usize) -> EdgeId {
        self.first_edge[&(t, h)]
    }

    pub fn out_neighbors_of(&self, v: VertexId) -> Vec<VertexId> {
        self.index_of(v).map_or_else(Vec::new, |i| {
            self.out[i].iter().map(|&j| self.ids[j]).collect()
        })
    }

    pub fn in_neighbors_of(&self, v: VertexId) -> Vec<VertexId> {
        self.index_of(v).map_or_else(Vec::new, |i| {
            self.inc[i].iter().map(|&j| self.ids[j]).collect()
        })
    }
}
