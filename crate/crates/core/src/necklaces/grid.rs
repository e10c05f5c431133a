use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    attachment_position, necklace_blocks, necklace_grid_host, necklace_vertex, validate_necklace,
    Necklace, NecklaceKind,
};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, PathSeq, VertexId};
use crate::layout::Step;
use crate::rays::{Orientation, RayIndex, RayPrefix};
use crate::verdict::{reject, RejectReason, Verdict};

/// A girder of a necklace grid, as its jumps between necklaces in order. The
/// walks between consecutive jumps stay inside the necklaces and are left
/// implicit, since every necklace is strongly connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecklaceGirder {
    pub level: u32,
    pub jumps: Vec<PathSeq>,
}

/// Number of girder edges leaving or entering a necklace in one bead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParityEntry {
    pub level: u32,
    /// 0-based, so the rule's odd beads have even index here.
    pub bead: usize,
    pub attachments: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecklaceGridCertificate {
    pub kind: NecklaceKind,
    /// Level to vertical necklace, with its bead witness fixed.
    pub necklaces: BTreeMap<u32, Necklace>,
    pub girders: Vec<NecklaceGirder>,
    pub parity: Vec<ParityEntry>,
    pub depth: usize,
}

impl NecklaceGridCertificate {
    pub fn levels(&self) -> u32 {
        self.necklaces.len() as u32
    }

    /// Each necklace's induced subgraph of `g`, plus the girder jumps.
    pub fn subgraph(&self, g: &MultiDigraph) -> MultiDigraph {
        let mut out = MultiDigraph::new();
        for n in self.necklaces.values() {
            out = out
                .union(&g.induced(&n.union()))
                .expect("edge ids come from one graph");
        }
        for gd in &self.girders {
            for p in &gd.jumps {
                for v in &p.vertices {
                    out.add_vertex(*v);
                }
                for e in &p.edges {
                    if out.edge(*e).is_none() {
                        let edge = g.edge(*e).expect("jump edges come from the host");
                        out.add_edge_with_id(edge.id, edge.tail, edge.head, edge.multiplicity)
                            .expect("endpoints added");
                    }
                }
            }
        }
        out
    }
}

/// Jump endpoints (by level) a girder of `kind` at `level` must follow.
pub fn girder_pattern(kind: NecklaceKind, level: u32) -> Vec<(u32, u32)> {
    let up = (1..level).map(|l| (l, l + 1));
    let down = (1..level).rev().map(|l| (l + 1, l));
    match kind {
        NecklaceKind::BidirectedNG => up.chain(down).collect(),
        NecklaceKind::OutwardDominatedNG => up.chain([(level, 1)]).collect(),
        NecklaceKind::InwardDominatedNG => [(1, level)].into_iter().chain(down).collect(),
    }
}

/// The bead an attachment at `v` is charged to: its own bead, or the odd
/// one of the two beads sharing it. `Err` names an even bead's private vertex.
fn charged_bead(n: &Necklace, v: VertexId) -> Option<std::result::Result<usize, usize>> {
    let l = n.bead_of(v)?;
    let shared = l + 1 < n.beads.len() && n.beads[l + 1].contains(&v);
    Some(match (l % 2 == 0, shared) {
        (true, _) => Ok(l),
        (false, true) => Ok(l + 1),
        (false, false) => Err(l),
    })
}

/// Attachment counts per bead over the edges of `g` with exactly one end on
/// a necklace, or the first parity rule broken.
pub fn parity_log(
    g: &MultiDigraph,
    necklaces: &BTreeMap<u32, Necklace>,
) -> std::result::Result<Vec<ParityEntry>, crate::verdict::Reject> {
    let mut log = Vec::new();
    for (&level, n) in necklaces {
        let union = n.union();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for e in g.edges() {
            let inside = match (union.contains(&e.tail), union.contains(&e.head)) {
                (true, false) => e.tail,
                (false, true) => e.head,
                _ => continue,
            };
            match charged_bead(n, inside).expect("vertex is on the necklace") {
                Ok(b) => *counts.entry(b).or_default() += 1,
                Err(b) => {
                    return reject(
                        RejectReason::ParityViolated,
                        format!("edge at {inside} inside even bead {b} of necklace {level}"),
                    )
                }
            }
        }
        if let Some((b, c)) = counts.iter().find(|(_, c)| **c > 1) {
            return reject(
                RejectReason::OddBeadOverloaded,
                format!("{c} attachments in bead {b} of necklace {level}"),
            );
        }
        log.extend(counts.into_iter().map(|(bead, attachments)| ParityEntry {
            level,
            bead,
            attachments,
        }));
    }
    Ok(log)
}

/// Full check of a necklace grid certificate against its subgraph `g`.
pub fn validate_necklace_grid(g: &MultiDigraph, cert: &NecklaceGridCertificate) -> Verdict {
    let levels = cert.levels();
    if levels < 2 || cert.necklaces.keys().copied().ne(1..=levels) {
        return reject(
            RejectReason::VerticalNotFamilyRay,
            "necklaces must be levels 1..=n with n >= 2",
        );
    }
    let mut level_of: BTreeMap<VertexId, u32> = BTreeMap::new();
    for (&l, n) in &cert.necklaces {
        validate_necklace(n, g).map_err(|r| crate::verdict::Reject {
            detail: format!("necklace {l}: {}", r.detail),
            ..r
        })?;
        for v in n.union() {
            if level_of.insert(v, l).is_some() {
                return reject(
                    RejectReason::VerticalsIntersect,
                    format!("vertex {v} on two necklaces"),
                );
            }
        }
    }
    let got: Vec<u32> = cert.girders.iter().map(|gd| gd.level).collect();
    if got != (2..=levels).collect::<Vec<_>>() {
        return reject(RejectReason::GirderShape, format!("girder levels {got:?}"));
    }
    let bead = |l: u32, v: VertexId| {
        cert.necklaces[&l]
            .bead_of(v)
            .expect("endpoint on its necklace")
    };
    let mut reached: BTreeMap<u32, usize> = BTreeMap::new();
    for gd in &cert.girders {
        let mut ends = Vec::new();
        for (k, p) in gd.jumps.iter().enumerate() {
            if let Err(m) = p.check_in(g) {
                return reject(
                    RejectReason::GirderBroken,
                    format!("girder {} jump {k}: {m}", gd.level),
                );
            }
            if p.interior().iter().any(|v| level_of.contains_key(v)) {
                return reject(
                    RejectReason::InternalRayContact,
                    format!("girder {} jump {k} meets a necklace", gd.level),
                );
            }
            match (level_of.get(&p.first()), level_of.get(&p.last())) {
                (Some(&a), Some(&b)) => ends.push((a, b)),
                _ => {
                    return reject(
                        RejectReason::GirderShape,
                        format!("girder {} jump {k} leaves the necklaces", gd.level),
                    )
                }
            }
        }
        if ends != girder_pattern(cert.kind, gd.level) {
            let other = match cert.kind {
                NecklaceKind::OutwardDominatedNG => Some(NecklaceKind::InwardDominatedNG),
                NecklaceKind::InwardDominatedNG => Some(NecklaceKind::OutwardDominatedNG),
                NecklaceKind::BidirectedNG => None,
            };
            let reason = match other {
                Some(o) if gd.level > 2 && ends == girder_pattern(o, gd.level) => {
                    RejectReason::ArchOrientation
                }
                _ => RejectReason::GirderShape,
            };
            return reject(reason, format!("girder {} runs {ends:?}", gd.level));
        }
        // along the girder, each necklace is met ever higher, and above every
        // earlier girder
        let mut here: BTreeMap<u32, usize> = BTreeMap::new();
        for (p, &(a, b)) in gd.jumps.iter().zip(&ends) {
            for (l, v) in [(a, p.first()), (b, p.last())] {
                let x = bead(l, v);
                let floor = here.get(&l).or(reached.get(&l));
                if floor.is_some_and(|f| x <= *f) {
                    return reject(
                        RejectReason::AvoidanceViolated,
                        format!("girder {} drops back on necklace {l}", gd.level),
                    );
                }
                here.insert(l, x);
            }
        }
        reached.extend(here);
    }
    let log = parity_log(g, &cert.necklaces)?;
    if log != cert.parity {
        return reject(
            RejectReason::ParityLogMismatch,
            "recorded parity log disagrees with the subgraph",
        );
    }
    Ok(())
}

/// Certificate of a generated necklace grid: girder `k` is the first block
/// of width `k`, and each necklace is witnessed by its three-vertex beads up
/// to one even bead past the last girder.
pub fn necklace_grid_certificate(
    kind: NecklaceKind,
    levels: u32,
    depth: usize,
) -> Result<(MultiDigraph, NecklaceGridCertificate)> {
    if levels < 2 {
        return Err(Error::BadParameters(
            "a necklace grid needs two levels".into(),
        ));
    }
    let blocks = necklace_blocks(kind, levels, depth);
    if blocks.len() < levels as usize - 1 {
        return Err(Error::obstruction(format!("{} girders", levels - 1), depth));
    }
    let t = necklace_grid_host(kind, levels).truncate(depth);
    let mut girders = Vec::new();
    let mut top = 0;
    for b in &blocks[..levels as usize - 1] {
        let mut jumps = Vec::new();
        for s in b.steps() {
            if let Step::Cross { from, to, row } | Step::Arch { from, to, row } = s {
                let (x, y) = (
                    necklace_vertex(from, attachment_position(row)),
                    necklace_vertex(to, attachment_position(row)),
                );
                jumps.push(PathSeq::from_vertices(&t.graph, vec![x, y])?);
                top = top.max(row);
            }
        }
        girders.push(NecklaceGirder {
            level: b.width,
            jumps,
        });
    }
    let end = attachment_position(top) + 3;
    let necklaces: BTreeMap<u32, Necklace> = (1..=levels)
        .map(|j| {
            let vertices = (0..=end).map(|p| necklace_vertex(j, p)).collect();
            (
                j,
                Necklace::of_bidirected_path(&RayPrefix {
                    index: RayIndex(j),
                    orientation: Orientation::Out,
                    vertices,
                }),
            )
        })
        .collect();
    let mut cert = NecklaceGridCertificate {
        kind,
        necklaces,
        girders,
        parity: Vec::new(),
        depth,
    };
    let g = cert.subgraph(&t.graph);
    cert.parity =
        parity_log(&g, &cert.necklaces).map_err(|r| Error::InvalidInput(r.to_string()))?;
    Ok((g, cert))
}

/// Beads for a bidirected path `vertices` in which each attachment position
/// is the private vertex of its own odd bead and even beads carry none.
/// Needs the first attachment above position 0 and gaps of at least 3.
pub fn rewitness(vertices: &[VertexId], attachments: &BTreeSet<usize>) -> Option<Necklace> {
    let mut beads = Vec::new();
    let mut start = 0;
    let bead = |a: usize, b: usize| vertices[a..=b].iter().copied().collect::<BTreeSet<_>>();
    for &p in attachments {
        if p <= start || p + 1 >= vertices.len() {
            return None;
        }
        if !beads.is_empty() {
            // even bead from the previous odd bead up to just below `p`
            if p - 1 <= start {
                return None;
            }
            beads.push(bead(start, p - 1));
            start = p - 1;
        }
        beads.push(bead(start, p + 1));
        start = p + 1;
    }
    if start + 1 < vertices.len() {
        beads.push(bead(start, start + 1));
    }
    Some(Necklace { beads })
}
