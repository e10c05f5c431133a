//! Necklaces, necklace grids, and the reduction of necklace families to ray families.

mod generate;
mod grid;
mod minor;
mod pipeline;
mod separation;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{strong_components, MultiDigraph, VertexId};
use crate::layout::GridKind;
use crate::rays::RayPrefix;
use crate::verdict::{reject, RejectReason, Verdict};

pub use generate::{
    attachment_position, necklace_blocks, necklace_coords, necklace_grid_host, necklace_vertex,
};
pub use grid::{
    girder_pattern, necklace_grid_certificate, parity_log, rewitness, validate_necklace_grid,
    NecklaceGirder, NecklaceGridCertificate, ParityEntry,
};
pub use minor::{
    build_transversal_paths, family_necklaces, necklace_to_ray_minor, StrongMinorMap, Transversal,
    TransversalPath,
};
pub use pipeline::{
    necklace_pipeline, necklace_pipeline_with, transversal_rounds, NecklaceRun, DEFAULT_PASSES,
};
pub use separation::{
    arch_separation, check_arch_separation, check_girder_obstruction, girder_crossings,
    SeparationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NecklaceKind {
    BidirectedNG,
    InwardDominatedNG,
    OutwardDominatedNG,
}

impl NecklaceKind {
    pub const ALL: [NecklaceKind; 3] = [
        NecklaceKind::BidirectedNG,
        NecklaceKind::InwardDominatedNG,
        NecklaceKind::OutwardDominatedNG,
    ];

    pub fn grid_kind(self) -> GridKind {
        match self {
            NecklaceKind::BidirectedNG => GridKind::BidirectedQG,
            NecklaceKind::InwardDominatedNG => GridKind::InwardDDQG,
            NecklaceKind::OutwardDominatedNG => GridKind::OutwardDDQG,
        }
    }

    pub fn from_grid_kind(k: GridKind) -> Self {
        match k {
            GridKind::BidirectedQG => NecklaceKind::BidirectedNG,
            GridKind::InwardDDQG => NecklaceKind::InwardDominatedNG,
            GridKind::OutwardDDQG => NecklaceKind::OutwardDominatedNG,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            NecklaceKind::BidirectedNG => "bidirected-ng",
            NecklaceKind::InwardDominatedNG => "inward-ng",
            NecklaceKind::OutwardDominatedNG => "outward-ng",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        NecklaceKind::ALL.into_iter().find(|k| k.slug() == s)
    }
}

/// A stored prefix of a necklace, given by the vertex sets of its beads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Necklace {
    pub beads: Vec<BTreeSet<VertexId>>,
}

impl Necklace {
    pub fn union(&self) -> BTreeSet<VertexId> {
        self.beads.iter().flatten().copied().collect()
    }

    /// Vertices of bead `l` (0-based) lying in neither neighbouring bead.
    pub fn private(&self, l: usize) -> BTreeSet<VertexId> {
        let mut out = self.beads[l].clone();
        if l > 0 {
            out.retain(|v| !self.beads[l - 1].contains(v));
        }
        if l + 1 < self.beads.len() {
            out.retain(|v| !self.beads[l + 1].contains(v));
        }
        out
    }

    /// Index of the first bead containing `v`.
    pub fn bead_of(&self, v: VertexId) -> Option<usize> {
        self.beads.iter().position(|b| b.contains(&v))
    }

    /// The standard witness of a bidirected path: bead `l` is positions
    /// `2l, 2l+1, 2l+2` (0-based) of the path.
    pub fn of_bidirected_path(spine: &RayPrefix) -> Necklace {
        let vs = &spine.vertices;
        let beads = (0..)
            .map(|l: usize| 2 * l)
            .take_while(|&p| p + 2 < vs.len())
            .map(|p| vs[p..=p + 2].iter().copied().collect())
            .collect();
        Necklace { beads }
    }
}

/// Checks bead strong connectivity and the consecutive-intersection pattern.
pub fn validate_necklace(n: &Necklace, g: &MultiDigraph) -> Verdict {
    for (l, bead) in n.beads.iter().enumerate() {
        if bead.is_empty() || !bead.is_subset(g.vertices()) {
            return reject(
                RejectReason::BeadNotStronglyConnected,
                format!("bead {l} is empty or outside the graph"),
            );
        }
        let sc = strong_components(&g.induced(bead));
        if sc.components.len() != 1 {
            return reject(RejectReason::BeadNotStronglyConnected, format!("bead {l}"));
        }
    }
    for l in 0..n.beads.len() {
        for k in l + 1..n.beads.len() {
            let meet = !n.beads[l].is_disjoint(&n.beads[k]);
            if k == l + 1 && !meet {
                return reject(
                    RejectReason::ConsecutiveDisjoint,
                    format!("beads {l} and {k}"),
                );
            }
            if k > l + 1 && meet {
                return reject(
                    RejectReason::NonConsecutiveIntersection,
                    format!("beads {l} and {k}"),
                );
            }
        }
    }
    Ok(())
}

/// The strong component of `N - x` that contains the deepest stored bead.
pub fn necklace_tail(
    n: &Necklace,
    g: &MultiDigraph,
    x: &BTreeSet<VertexId>,
) -> Result<BTreeSet<VertexId>> {
    let last = n.beads.last().ok_or(Error::PrefixTooShort)?;
    if !last.is_disjoint(x) {
        return Err(Error::PrefixTooShort);
    }
    let keep: BTreeSet<VertexId> = n.union().difference(x).copied().collect();
    let sub = g.induced(&keep);
    let sc = strong_components(&sub);
    let anchor = *last.iter().next().expect("beads are nonempty");
    let comp: BTreeSet<VertexId> = sc
        .component_containing(anchor)
        .expect("anchor kept")
        .iter()
        .copied()
        .collect();
    if !last.is_subset(&comp) {
        return Err(Error::PrefixTooShort);
    }
    Ok(comp)
}
