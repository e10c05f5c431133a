//! Row/ray coordinates of the canonical grid blocks.
//!
//! A canonical host draws every vertical ray as a column of vertices, row 0
//! being the root. Girders are laid out as blocks of consecutive rows, each
//! block touching rays `1..=width`.

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, VertexId};

const RAY_BITS: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GridKind {
    BidirectedQG,
    InwardDDQG,
    OutwardDDQG,
}

impl GridKind {
    pub const ALL: [GridKind; 3] = [
        GridKind::BidirectedQG,
        GridKind::InwardDDQG,
        GridKind::OutwardDDQG,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            GridKind::BidirectedQG => "bidirected-qg",
            GridKind::InwardDDQG => "inward-ddqg",
            GridKind::OutwardDDQG => "outward-ddqg",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        GridKind::ALL.into_iter().find(|k| k.slug() == s)
    }
}

/// Vertex on ray `ray` at `row`.
pub fn grid_vertex(ray: u32, row: u64) -> VertexId {
    VertexId((row << RAY_BITS) | ray as u64)
}

/// Inverse of [`grid_vertex`].
pub fn grid_coords(v: VertexId) -> (u32, u64) {
    ((v.0 & ((1 << RAY_BITS) - 1)) as u32, v.0 >> RAY_BITS)
}

/// Id of the ray edge leaving `v` (for out-rays; tail-based).
pub fn ray_edge_id(tail: VertexId) -> EdgeId {
    EdgeId(tail.0 << 1)
}

/// Id of the unique non-ray edge leaving `tail`.
pub fn cross_edge_id(tail: VertexId) -> EdgeId {
    EdgeId((tail.0 << 1) | 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// Edge from ray `from` to ray `to`, both at `row`.
    Cross { from: u32, to: u32, row: u64 },
    /// Edge along ray `ray` from `row` to `row + 1`.
    Along { ray: u32, row: u64 },
    /// Dominating edge between ray 1 and the block's last ray, at `row`.
    Arch { from: u32, to: u32, row: u64 },
}

impl Step {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        match *self {
            Step::Cross { from, to, row } | Step::Arch { from, to, row } => {
                (grid_vertex(from, row), grid_vertex(to, row))
            }
            Step::Along { ray, row } => (grid_vertex(ray, row), grid_vertex(ray, row + 1)),
        }
    }
}

/// One girder occupying rows `start .. start + height()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: GridKind,
    pub width: u32,
    pub start: u64,
}

impl Block {
    pub fn height(&self) -> u64 {
        let w = self.width as u64;
        match self.kind {
            GridKind::BidirectedQG => 2 * w - 2,
            GridKind::InwardDDQG | GridKind::OutwardDDQG => w,
        }
    }

    /// The girder as a walk: staircases, the edge on the last ray, and the arch.
    /// Consecutive `Cross` steps are joined by single `Along` steps.
    pub fn steps(&self) -> Vec<Step> {
        let w = self.width;
        let r = self.start;
        let mut s = Vec::new();
        let up = |s: &mut Vec<Step>| {
            for j in 1..w {
                let row = r + j as u64 - 1;
                if j > 1 {
                    s.push(Step::Along {
                        ray: j,
                        row: row - 1,
                    });
                }
                s.push(Step::Cross {
                    from: j,
                    to: j + 1,
                    row,
                });
            }
        };
        let down = |s: &mut Vec<Step>, first: u64| {
            for j in (1..w).rev() {
                let row = first + (w - 1 - j) as u64;
                if j < w - 1 {
                    s.push(Step::Along {
                        ray: j + 1,
                        row: row - 1,
                    });
                }
                s.push(Step::Cross {
                    from: j + 1,
                    to: j,
                    row,
                });
            }
        };
        match self.kind {
            GridKind::BidirectedQG => {
                up(&mut s);
                s.push(Step::Along {
                    ray: w,
                    row: r + w as u64 - 2,
                });
                down(&mut s, r + w as u64 - 1);
            }
            GridKind::OutwardDDQG => {
                up(&mut s);
                s.push(Step::Along {
                    ray: w,
                    row: r + w as u64 - 2,
                });
                s.push(Step::Arch {
                    from: w,
                    to: 1,
                    row: r + w as u64 - 1,
                });
            }
            GridKind::InwardDDQG => {
                s.push(Step::Arch {
                    from: 1,
                    to: w,
                    row: r,
                });
                s.push(Step::Along { ray: w, row: r });
                down(&mut s, r + 1);
            }
        }
        s
    }

    /// Vertex sequence of the girder walk.
    pub fn walk(&self) -> Vec<VertexId> {
        let steps = self.steps();
        let mut out = vec![steps[0].endpoints().0];
        for st in &steps {
            out.push(st.endpoints().1);
        }
        out
    }
}

/// Lays out blocks of the given widths bottom-up starting at row 1, with
/// `spacing` idle rows between consecutive blocks.
pub fn stack_blocks(
    kind: GridKind,
    widths: impl IntoIterator<Item = u32>,
    spacing: u64,
) -> Vec<Block> {
    let mut row = 1;
    let mut out = Vec::new();
    for width in widths {
        let b = Block {
            kind,
            width,
            start: row,
        };
        row += b.height() + spacing;
        out.push(b);
    }
    out
}

/// First row after the last block.
pub fn top_row(blocks: &[Block]) -> u64 {
    blocks.last().map_or(1, |b| b.start + b.height())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        assert_eq!(grid_coords(grid_vertex(7, 123)), (7, 123));
    }

    #[test]
    fn smallest_bidirected_block() {
        let b = Block {
            kind: GridKind::BidirectedQG,
            width: 2,
            start: 1,
        };
        assert_eq!(
            b.steps(),
            vec![
                Step::Cross {
                    from: 1,
                    to: 2,
                    row: 1
                },
                Step::Along { ray: 2, row: 1 },
                Step::Cross {
                    from: 2,
                    to: 1,
                    row: 2
                },
            ]
        );
        assert_eq!(b.height(), 2);
    }

    #[test]
    fn walks_are_simple_and_connected() {
        for kind in GridKind::ALL {
            for w in 2..9 {
                let b = Block {
                    kind,
                    width: w,
                    start: 5,
                };
                let walk = b.walk();
                let mut sorted = walk.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), walk.len(), "{kind:?} width {w}");
                let rows: Vec<u64> = walk.iter().map(|v| grid_coords(*v).1).collect();
                assert!(rows.iter().all(|&y| y >= 5 && y < 5 + b.height()));
                let steps = b.steps();
                for pair in steps.windows(2) {
                    assert_eq!(pair[0].endpoints().1, pair[1].endpoints().0);
                }
            }
        }
    }

    #[test]
    fn arches_point_the_right_way() {
        let out = Block {
            kind: GridKind::OutwardDDQG,
            width: 4,
            start: 1,
        };
        assert!(matches!(
            out.steps().last(),
            Some(Step::Arch { from: 4, to: 1, .. })
        ));
        let inw = Block {
            kind: GridKind::InwardDDQG,
            width: 4,
            start: 1,
        };
        assert!(matches!(
            inw.steps().first(),
            Some(Step::Arch { from: 1, to: 4, .. })
        ));
    }
}
