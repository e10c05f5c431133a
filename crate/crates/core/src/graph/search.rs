use std::collections::{BTreeSet, VecDeque};

use super::{MultiDigraph, PathSeq, VertexId};

/// Vertices reachable from any of `starts` (including the starts present in `g`).
pub fn reachable_from(g: &MultiDigraph, starts: &[VertexId]) -> BTreeSet<VertexId> {
    let d = g.dense();
    let mut seen = vec![false; d.len()];
    let mut queue = VecDeque::new();
    for s in starts {
        if let Some(i) = d.index_of(*s) {
            if !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in d.out(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..d.len()).filter(|&i| seen[i]).map(|i| d.id(i)).collect()
}

/// An A–B path request: start in `sources`, end in `targets`, and meet
/// `sources ∪ targets` only at the two ends.
pub struct PathQuery<'a> {
    pub sources: &'a BTreeSet<VertexId>,
    pub targets: &'a BTreeSet<VertexId>,
    /// Excluded everywhere, endpoints included.
    pub forbidden: &'a BTreeSet<VertexId>,
    /// Extra filter on interior vertices.
    pub interior: Option<&'a dyn Fn(VertexId) -> bool>,
}

impl<'a> PathQuery<'a> {
    pub fn new(
        sources: &'a BTreeSet<VertexId>,
        targets: &'a BTreeSet<VertexId>,
        forbidden: &'a BTreeSet<VertexId>,
    ) -> Self {
        PathQuery {
            sources,
            targets,
            forbidden,
            interior: None,
        }
    }

    pub fn with_interior(mut self, f: &'a dyn Fn(VertexId) -> bool) -> Self {
        self.interior = Some(f);
        self
    }
}

/// Lexicographically smallest vertex sequence among the shortest paths
/// answering `q`, or `None` if there is none.
pub fn shortest_path(g: &MultiDigraph, q: &PathQuery<'_>) -> Option<PathSeq> {
    let d = g.dense();
    let n = d.len();
    const FAR: usize = usize::MAX;
    let is_source: Vec<bool> = (0..n).map(|i| q.sources.contains(&d.id(i))).collect();
    let is_target: Vec<bool> = (0..n)
        .map(|i| q.targets.contains(&d.id(i)) && !q.forbidden.contains(&d.id(i)))
        .collect();
    let inner_ok: Vec<bool> = (0..n)
        .map(|i| {
            let v = d.id(i);
            !is_source[i]
                && !q.targets.contains(&v)
                && !q.forbidden.contains(&v)
                && q.interior.is_none_or(|f| f(v))
        })
        .collect();

    // distance to a target, walking backwards through allowed interior vertices
    let mut dist = vec![FAR; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        if is_target[i] {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in d.inc(v) {
            if inner_ok[u] && dist[u] == FAR {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }

    let step_ok = |w: usize, remaining: usize| -> bool {
        if remaining == 1 {
            is_target[w]
        } else {
            inner_ok[w] && dist[w] == remaining - 1
        }
    };
    let source_dist = |a: usize| -> usize {
        if is_target[a] {
            return 0;
        }
        d.out(a)
            .iter()
            .filter_map(|&w| {
                if is_target[w] {
                    Some(1)
                } else if inner_ok[w] && dist[w] != FAR {
                    Some(dist[w] + 1)
                } else {
                    None
                }
            })
            .min()
            .unwrap_or(FAR)
    };

    let mut best: Option<(usize, usize)> = None;
    for (i, &src) in is_source.iter().enumerate().take(n) {
        if !src || q.forbidden.contains(&d.id(i)) {
            continue;
        }
        let sd = source_dist(i);
        if sd != FAR && best.is_none_or(|(bd, _)| sd < bd) {
            best = Some((sd, i));
        }
    }
    let (len, start) = best?;
    let mut idx = vec![start];
    let mut cur = start;
    for remaining in (1..=len).rev() {
        let next = *d.out(cur).iter().find(|&&w| step_ok(w, remaining))?;
        idx.push(next);
        cur = next;
    }
    let edges = idx.windows(2).map(|w| d.edge_idx(w[0], w[1])).collect();
    Some(PathSeq {
        vertices: idx.iter().map(|&i| d.id(i)).collect(),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u64, edges: &[(u64, u64)]) -> MultiDigraph {
        let mut g = MultiDigraph::new();
        for i in 0..n {
            g.add_vertex(VertexId(i));
        }
        for &(a, b) in edges {
            g.add_edge(VertexId(a), VertexId(b)).unwrap();
        }
        g
    }

    fn set(xs: &[u64]) -> BTreeSet<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    #[test]
    fn picks_lexicographically_smallest_shortest() {
        // 0 -> {2,1} -> 3, plus a longer detour 0 -> 4 -> 5 -> 3
        let g = graph(6, &[(0, 2), (0, 1), (1, 3), (2, 3), (0, 4), (4, 5), (5, 3)]);
        let (s, t, f) = (set(&[0]), set(&[3]), set(&[]));
        let p = shortest_path(&g, &PathQuery::new(&s, &t, &f)).unwrap();
        assert_eq!(p.vertices, vec![VertexId(0), VertexId(1), VertexId(3)]);
        let f = set(&[1, 2]);
        let p = shortest_path(&g, &PathQuery::new(&s, &t, &f)).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn interior_may_not_touch_terminals() {
        // the only route passes through another source
        let g = graph(3, &[(0, 1), (1, 2)]);
        let (s, t, f) = (set(&[0, 1]), set(&[2]), set(&[]));
        let p = shortest_path(&g, &PathQuery::new(&s, &t, &f)).unwrap();
        assert_eq!(p.vertices, vec![VertexId(1), VertexId(2)]);
        let f = set(&[1]);
        assert!(shortest_path(&g, &PathQuery::new(&s, &t, &f)).is_none());
    }

    #[test]
    fn interior_filter_applies() {
        let g = graph(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let (s, t, f) = (set(&[0]), set(&[3]), set(&[]));
        let not_one = |v: VertexId| v != VertexId(1);
        let p = shortest_path(&g, &PathQuery::new(&s, &t, &f).with_interior(&not_one)).unwrap();
        assert_eq!(p.vertices[1], VertexId(2));
    }

    #[test]
    fn reachability() {
        let g = graph(4, &[(0, 1), (1, 2)]);
        assert_eq!(reachable_from(&g, &[VertexId(0)]), set(&[0, 1, 2]));
        assert_eq!(reachable_from(&g, &[VertexId(3)]), set(&[3]));
    }
}
