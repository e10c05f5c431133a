use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::json;

use super::NecklaceKind;
use crate::graph::{EdgeId, MultiDigraph, Multiplicity, VertexId};
use crate::layout::{stack_blocks, top_row, Block, Step};
use crate::rays::{
    Certification, HostGenerator, Orientation, RayIndex, RayPrefix, RayedHost, Truncation,
};

const NECKLACE_BITS: u64 = 20;

/// Vertex at 0-based position `pos` of necklace `j`.
pub fn necklace_vertex(j: u32, pos: u64) -> VertexId {
    VertexId((pos << NECKLACE_BITS) | j as u64)
}

pub fn necklace_coords(v: VertexId) -> (u32, u64) {
    (
        (v.0 & ((1 << NECKLACE_BITS) - 1)) as u32,
        v.0 >> NECKLACE_BITS,
    )
}

/// Position on a necklace of the attachment vertex for grid row `row`: the
/// private vertex of odd bead `2 row + 1`.
pub fn attachment_position(row: u64) -> u64 {
    4 * row + 1
}

fn forward_id(tail: VertexId) -> EdgeId {
    EdgeId(tail.0 << 2)
}

fn backward_id(tail: VertexId) -> EdgeId {
    EdgeId((tail.0 << 2) | 1)
}

fn cross_id(tail: VertexId) -> EdgeId {
    EdgeId((tail.0 << 2) | 2)
}

struct NecklaceGridHost {
    kind: NecklaceKind,
    levels: u32,
}

impl NecklaceGridHost {
    pub(super) fn blocks(&self, depth: usize) -> Vec<Block> {
        stack_blocks(
            self.kind.grid_kind(),
            (0..depth).map(|b| 2 + (b as u32 % (self.levels - 1))),
            0,
        )
    }
}

impl HostGenerator for NecklaceGridHost {
    fn truncate(&self, depth: usize) -> Truncation {
        let blocks = self.blocks(depth);
        let top = top_row(&blocks);
        // last attachment row is `top`; close its odd bead and one even bead
        let last_pos = attachment_position(top) + 3;
        let mut g = MultiDigraph::new();
        let mut rays = BTreeMap::new();
        for j in 1..=self.levels {
            let vertices: Vec<VertexId> = (0..=last_pos).map(|p| necklace_vertex(j, p)).collect();
            for v in &vertices {
                g.add_vertex(*v);
            }
            for w in vertices.windows(2) {
                g.add_edge_with_id(forward_id(w[0]), w[0], w[1], Multiplicity::one())
                    .expect("fresh");
                g.add_edge_with_id(backward_id(w[1]), w[1], w[0], Multiplicity::one())
                    .expect("fresh");
            }
            rays.insert(
                RayIndex(j),
                RayPrefix {
                    index: RayIndex(j),
                    orientation: Orientation::Out,
                    vertices,
                },
            );
        }
        for b in &blocks {
            for s in b.steps() {
                if let Step::Cross { from, to, row } | Step::Arch { from, to, row } = s {
                    let t = necklace_vertex(from, attachment_position(row));
                    let h = necklace_vertex(to, attachment_position(row));
                    g.add_edge_with_id(cross_id(t), t, h, Multiplicity::one())
                        .expect("one attachment per vertex");
                }
            }
        }
        let first = blocks.last().map_or(top, |b| b.start);
        let frontier: BTreeSet<VertexId> = g
            .vertices()
            .iter()
            .copied()
            .filter(|v| necklace_coords(*v).1 >= attachment_position(first) - 1)
            .collect();
        Truncation::new(g, rays, frontier, depth)
    }
}

/// Necklace grid of the given kind over `levels` necklaces, each a bidirected
/// path (beads of three consecutive vertices), with single-edge girder steps
/// attached to the private vertices of odd beads.
///
/// The family rays are the forward spines of the necklaces.
pub fn necklace_grid_host(kind: NecklaceKind, levels: u32) -> RayedHost {
    assert!(levels >= 2, "a grid needs two necklaces");
    let patterns = crate::catalog::grid_patterns(kind.grid_kind(), Some(levels));
    let params = json!({"kind": kind.slug(), "levels": levels});
    RayedHost::new(
        Orientation::Out,
        "necklace-grid",
        params
            .as_object()
            .expect("object")
            .clone()
            .into_iter()
            .collect(),
        Certification::exact(patterns),
        Arc::new(NecklaceGridHost { kind, levels }),
    )
}

/// Grid blocks of a necklace grid host at `depth`.
pub fn necklace_blocks(kind: NecklaceKind, levels: u32, depth: usize) -> Vec<Block> {
    NecklaceGridHost { kind, levels }.blocks(depth)
}
