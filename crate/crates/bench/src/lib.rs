//! Shared inputs for the benchmarks.

use std::collections::BTreeSet;

use digrid::catalog::canonical_grid;
use digrid::{GridKind, MultiDigraph, RayedHost, VertexId};

/// A canonical bidirected grid host and its truncation graph at `depth`.
pub fn grid_graph(levels: u32, depth: usize) -> (RayedHost, MultiDigraph) {
    let host = canonical_grid(GridKind::BidirectedQG, levels);
    let g = host.truncate(depth).graph.clone();
    (host, g)
}

/// Vertex sets of the first and last family ray at `depth`.
pub fn outer_rays(host: &RayedHost, depth: usize) -> (BTreeSet<VertexId>, BTreeSet<VertexId>) {
    let t = host.truncate(depth);
    let set = |r: &digrid::RayPrefix| r.vertices.iter().copied().collect::<BTreeSet<_>>();
    let first = t.rays.values().next().expect("rays");
    let last = t.rays.values().next_back().expect("rays");
    (set(first), set(last))
}
