//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use digrid::{MultiDigraph, VertexId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn set(xs: &[u64]) -> BTreeSet<VertexId> {
    xs.iter().map(|&x| VertexId(x)).collect()
}

/// Random digraph on `0..n` where each ordered pair (loops included) is an
/// edge with probability `p`; a few pairs get a parallel copy.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: u64, p: f64) -> MultiDigraph {
    let mut g = MultiDigraph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v));
    }
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(p) {
                g.add_edge(VertexId(a), VertexId(b)).unwrap();
                if rng.gen_bool(0.1) {
                    g.add_edge(VertexId(a), VertexId(b)).unwrap();
                }
            }
        }
    }
    g
}

/// Random nonempty subset of `0..n`.
pub fn random_subset(rng: &mut ChaCha8Rng, n: u64) -> BTreeSet<VertexId> {
    loop {
        let s: BTreeSet<VertexId> = (0..n)
            .filter(|_| rng.gen_bool(0.35))
            .map(VertexId)
            .collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Every A–B path by exhaustive DFS: simple, endpoints in `a` and `b`, no
/// interior vertex in `a ∪ b`, nothing forbidden. Vertices in both sets give
/// one-vertex paths.
pub fn all_ab_paths(
    g: &MultiDigraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    forbidden: &BTreeSet<VertexId>,
) -> Vec<Vec<VertexId>> {
    fn walk(
        g: &MultiDigraph,
        b: &BTreeSet<VertexId>,
        blocked: &BTreeSet<VertexId>,
        path: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        let here = *path.last().unwrap();
        for next in g.out_neighbors(here) {
            if path.contains(&next) || blocked.contains(&next) && !b.contains(&next) {
                continue;
            }
            path.push(next);
            if b.contains(&next) {
                out.push(path.clone());
            } else {
                walk(g, b, blocked, path, out);
            }
            path.pop();
        }
    }
    let blocked: BTreeSet<VertexId> = a.union(forbidden).copied().collect();
    let mut out = Vec::new();
    for &s in a {
        if forbidden.contains(&s) {
            continue;
        }
        if b.contains(&s) {
            out.push(vec![s]);
            continue;
        }
        let b_ok: BTreeSet<VertexId> = b.difference(forbidden).copied().collect();
        walk(g, &b_ok, &blocked, &mut vec![s], &mut out);
    }
    out
}

/// Largest number of pairwise vertex-disjoint paths among `paths`.
pub fn max_disjoint_subfamily(paths: &[Vec<VertexId>]) -> usize {
    fn go(paths: &[Vec<VertexId>], i: usize, used: &mut BTreeSet<VertexId>) -> usize {
        if i == paths.len() {
            return 0;
        }
        let skip = go(paths, i + 1, used);
        if paths[i].iter().any(|v| used.contains(v)) {
            return skip;
        }
        used.extend(paths[i].iter().copied());
        let take = 1 + go(paths, i + 1, used);
        for v in &paths[i] {
            used.remove(v);
        }
        skip.max(take)
    }
    go(paths, 0, &mut BTreeSet::new())
}

pub fn brute_disjoint_count(
    g: &MultiDigraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    forbidden: &BTreeSet<VertexId>,
) -> usize {
    max_disjoint_subfamily(&all_ab_paths(g, a, b, forbidden))
}
