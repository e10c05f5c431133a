use std::collections::{BTreeSet, VecDeque};

use super::{Dense, MultiDigraph, PathSeq, VertexId};
use crate::error::{Error, Result};

struct Arc {
    to: usize,
    cap: u8,
    rev: usize,
    orig: bool,
}

struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network {
            adj: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    fn add(&mut self, from: usize, to: usize) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len();
        self.adj[from].push(Arc {
            to,
            cap: 1,
            rev: rf,
            orig: true,
        });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            rev: rt,
            orig: false,
        });
    }

    /// One BFS augmentation of a unit of flow from `s` to `t`.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.adj.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for (k, a) in self.adj[v].iter().enumerate() {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    prev[a.to] = Some((v, k));
                    queue.push_back(a.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while let Some((u, k)) = prev[v] {
            let rev = self.adj[u][k].rev;
            self.adj[u][k].cap -= 1;
            self.adj[v][rev].cap += 1;
            v = u;
        }
        true
    }
}

/// Up to `k` pairwise vertex-disjoint A–B paths from `sources` to `sinks`
/// avoiding `forbidden`, found by unit vertex-capacity max flow.
///
/// Paths meet `sources ∪ sinks` only at their ends. Loops are ignored and
/// parallel edges count once. The result is deterministic but not guaranteed
/// to be lexicographically minimal among maximum systems.
pub fn disjoint_paths(
    g: &MultiDigraph,
    sources: &BTreeSet<VertexId>,
    sinks: &BTreeSet<VertexId>,
    forbidden: &BTreeSet<VertexId>,
    k: usize,
) -> Result<Vec<PathSeq>> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(Error::EmptyTerminalSet);
    }
    let d = g.dense();
    let n = d.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    let is_src: Vec<bool> = (0..n).map(|i| sources.contains(&d.id(i))).collect();
    let is_snk: Vec<bool> = (0..n).map(|i| sinks.contains(&d.id(i))).collect();
    let banned: Vec<bool> = (0..n).map(|i| forbidden.contains(&d.id(i))).collect();

    for i in 0..n {
        if banned[i] {
            continue;
        }
        net.add(2 * i, 2 * i + 1);
        if is_src[i] {
            net.add(s, 2 * i);
        }
        if is_snk[i] {
            net.add(2 * i + 1, t);
        }
    }
    for u in 0..n {
        // a path leaves a sink only by ending there
        if banned[u] || is_snk[u] {
            continue;
        }
        for &w in d.out(u) {
            // a path enters a source only by starting there
            if banned[w] || is_src[w] {
                continue;
            }
            net.add(2 * u + 1, 2 * w);
        }
    }

    let mut found = 0;
    while found < k && net.augment(s, t) {
        found += 1;
    }
    Ok(decompose(&net, &d, &is_src))
}

fn decompose(net: &Network, d: &Dense, is_src: &[bool]) -> Vec<PathSeq> {
    let n = d.len();
    let t = 2 * n + 1;
    let carries = |node: usize| {
        net.adj[node]
            .iter()
            .find(|a| a.orig && a.cap == 0)
            .map(|a| a.to)
    };
    let mut paths = Vec::new();
    for (a, &src) in is_src.iter().enumerate().take(n) {
        if !src || carries(2 * a).is_none() {
            continue;
        }
        let mut idx = vec![a];
        let mut out_node = 2 * a + 1;
        while let Some(x) = carries(out_node) {
            if x == t {
                break;
            }
            idx.push(x / 2);
            out_node = x + 1;
        }
        let edges = idx.windows(2).map(|w| d.edge_idx(w[0], w[1])).collect();
        paths.push(PathSeq {
            vertices: idx.iter().map(|&i| d.id(i)).collect(),
            edges,
        });
    }
    paths
}

/// Size of a maximum family of disjoint A–B paths (capped at the graph size).
pub fn max_disjoint_count(
    g: &MultiDigraph,
    sources: &BTreeSet<VertexId>,
    sinks: &BTreeSet<VertexId>,
    forbidden: &BTreeSet<VertexId>,
) -> Result<usize> {
    Ok(disjoint_paths(g, sources, sinks, forbidden, usize::MAX)?.len())
}
