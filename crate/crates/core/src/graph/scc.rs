use std::collections::{BTreeMap, BTreeSet};

use super::{MultiDigraph, VertexId};

/// Partition into strongly connected components plus the condensation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongComponents {
    /// Components, each sorted, listed in order of their smallest vertex.
    pub components: Vec<Vec<VertexId>>,
    /// Component index of each vertex.
    pub component_of: BTreeMap<VertexId, usize>,
    /// Edges between distinct components, deduplicated.
    pub condensation: BTreeSet<(usize, usize)>,
}

impl StrongComponents {
    pub fn component_containing(&self, v: VertexId) -> Option<&[VertexId]> {
        self.component_of
            .get(&v)
            .map(|&c| self.components[c].as_slice())
    }

    /// Nontrivial components: more than one vertex, or a single vertex with a loop.
    pub fn nontrivial<'a>(
        &'a self,
        g: &'a MultiDigraph,
    ) -> impl Iterator<Item = &'a [VertexId]> + 'a {
        self.components.iter().filter_map(move |c| {
            let looped = c.len() == 1 && g.find_edge(c[0], c[0]).is_some();
            (c.len() > 1 || looped).then_some(c.as_slice())
        })
    }
}

/// Tarjan's algorithm, iterative so deep truncations do not overflow the stack.
pub fn strong_components(g: &MultiDigraph) -> StrongComponents {
    let d = g.dense();
    let n = d.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = d.out(v).get(*next) {
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let id = raw.len();
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = id;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                raw.push(members);
            }
        }
    }

    // renumber by smallest member so output does not depend on discovery order
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by_key(|&c| raw[c].iter().min().copied());
    let mut renumber = vec![0usize; raw.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let components: Vec<Vec<VertexId>> = order
        .iter()
        .map(|&c| {
            let mut m: Vec<VertexId> = raw[c].iter().map(|&i| d.id(i)).collect();
            m.sort();
            m
        })
        .collect();
    let mut component_of = BTreeMap::new();
    for i in 0..n {
        component_of.insert(d.id(i), renumber[comp[i]]);
    }
    let mut condensation = BTreeSet::new();
    for v in 0..n {
        for &w in d.out(v) {
            let (a, b) = (renumber[comp[v]], renumber[comp[w]]);
            if a != b {
                condensation.insert((a, b));
            }
        }
    }
    StrongComponents {
        components,
        component_of,
        condensation,
    }
}
