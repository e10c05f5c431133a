use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{attachment_position, necklace_blocks, necklace_vertex, NecklaceKind};
use crate::error::{Error, Result};
use crate::graph::{disjoint_paths, strong_components, PathSeq, VertexId};
use crate::layout::{Block, Step};
use crate::rays::{Orientation, RayedHost};
use crate::verdict::{reject, RejectReason, Verdict};

/// Levels of a generated necklace grid of `kind`, or `BadParameters`.
fn instance_levels(host: &RayedHost, kind: NecklaceKind) -> Result<u32> {
    let ok = host.catalog_id == "necklace-grid"
        && host.orientation == Orientation::Out
        && host.parameters.get("kind").and_then(|k| k.as_str()) == Some(kind.slug());
    let levels = host.parameters.get("levels").and_then(|l| l.as_u64());
    match (ok, levels) {
        (true, Some(l)) => Ok(l as u32),
        _ => Err(Error::BadParameters(format!(
            "expected a generated {} host",
            kind.slug()
        ))),
    }
}

fn at(j: u32, row: u64) -> VertexId {
    necklace_vertex(j, attachment_position(row))
}

/// Positions `from..=to` of necklace `j`, in either direction.
fn along(j: u32, from: u64, to: u64) -> Vec<VertexId> {
    if from <= to {
        (from..=to).map(|p| necklace_vertex(j, p)).collect()
    } else {
        (to..=from).rev().map(|p| necklace_vertex(j, p)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// The deep arch, from the last necklace down to the first.
    pub arch: PathSeq,
    /// From the arch's end back to its start without using an arch: up the
    /// first necklace, through the next widest staircase, down the last.
    pub path: PathSeq,
    pub start: VertexId,
    /// Strong component of `start` once `path` is deleted (or not).
    pub component: BTreeSet<VertexId>,
    pub reaches_frontier: bool,
}

/// Cuts an outward dominated necklace grid along an arch-free route that
/// closes up the first widest arch at grid row `tail` or later, and reports the
/// strong component of `start` (default: root of the first necklace).
/// Keeping the route (`remove_path = false`) is the control.
pub fn arch_separation(
    host: &RayedHost,
    tail: usize,
    depth: usize,
    start: Option<VertexId>,
    remove_path: bool,
) -> Result<SeparationReport> {
    let n = instance_levels(host, NecklaceKind::OutwardDominatedNG)?;
    let blocks = necklace_blocks(NecklaceKind::OutwardDominatedNG, n, depth);
    // the closing staircase must sit below the last block, which touches
    // the frontier
    let inner = &blocks[..blocks.len().saturating_sub(1)];
    let widest: Vec<&Block> = inner
        .iter()
        .filter(|b| b.width == n && b.start + n as u64 > tail as u64)
        .take(2)
        .collect();
    let [first, second] = widest[..] else {
        return Err(Error::obstruction(
            format!("two blocks of width {n} from row {tail}"),
            depth,
        ));
    };
    let t = host.truncate(depth);
    let arch_row = first.start + n as u64 - 1;
    let arch = PathSeq::from_vertices(&t.graph, vec![at(n, arch_row), at(1, arch_row)])?;
    let r = second.start;
    let mut route = along(1, attachment_position(arch_row), attachment_position(r));
    for j in 1..n {
        let row = r + j as u64 - 1;
        route.push(at(j + 1, row));
        let next = if j + 1 < n {
            attachment_position(row + 1)
        } else {
            attachment_position(arch_row)
        };
        route.extend(
            along(j + 1, attachment_position(row), next)
                .into_iter()
                .skip(1),
        );
    }
    let path = PathSeq::from_vertices(&t.graph, route)?;
    let start = start.unwrap_or(necklace_vertex(1, 0));
    let on_path = path.vertex_set();
    if on_path.contains(&start) {
        return Err(Error::InvalidInput(format!(
            "start vertex {start} lies on the route"
        )));
    }
    let g = if remove_path {
        t.graph.without(&on_path)
    } else {
        t.graph.clone()
    };
    let sc = strong_components(&g);
    let component: BTreeSet<VertexId> = sc
        .component_containing(start)
        .ok_or(Error::UnknownVertex(start))?
        .iter()
        .copied()
        .collect();
    let reaches_frontier = !component.is_disjoint(&t.frontier);
    Ok(SeparationReport {
        arch,
        path,
        start,
        component,
        reaches_frontier,
    })
}

/// Accepts when deleting the route leaves the root of the first necklace in
/// a strong component away from the truncation's frontier, so it stays
/// finite at every depth.
pub fn check_arch_separation(host: &RayedHost, tail: usize, depth: usize) -> Result<Verdict> {
    let report = arch_separation(host, tail, depth, None, true)?;
    Ok(if report.reaches_frontier {
        reject(
            RejectReason::ComponentReachesFrontier,
            format!(
                "component of {} has {} vertices",
                report.start,
                report.component.len()
            ),
        )
    } else {
        Ok(())
    })
}

/// Paths (at most one) from the first necklace's tail to the third's tail
/// above the first girder of width 3, avoiding everything below that girder
/// and, if `block_middle`, the second necklace's tail. Empty below 3 levels.
pub fn girder_crossings(
    host: &RayedHost,
    depth: usize,
    block_middle: bool,
) -> Result<Vec<PathSeq>> {
    let n = instance_levels(host, NecklaceKind::BidirectedNG)?;
    if n < 3 {
        return Ok(Vec::new());
    }
    let blocks = necklace_blocks(NecklaceKind::BidirectedNG, n, depth);
    let block = blocks
        .iter()
        .find(|b| b.width == 3)
        .ok_or_else(|| Error::obstruction("a girder of width 3", depth))?;
    let t = host.truncate(depth);
    // highest position the girder reaches on each of the three necklaces
    let mut top = [0u64; 3];
    for s in block.steps() {
        match s {
            Step::Cross { from, to, row } | Step::Arch { from, to, row } => {
                for j in [from, to] {
                    top[j as usize - 1] = top[j as usize - 1].max(attachment_position(row));
                }
            }
            Step::Along { ray, row } => {
                top[ray as usize - 1] = top[ray as usize - 1].max(attachment_position(row + 1))
            }
        }
    }
    let mut below = BTreeSet::new();
    let mut tails = Vec::new();
    for j in 1..=3u32 {
        let ray = t.ray(crate::rays::RayIndex(j))?;
        let cut = top[j as usize - 1] as usize;
        below.extend(ray.vertices[..=cut].iter().copied());
        tails.push(
            ray.vertices[cut + 1..]
                .iter()
                .copied()
                .collect::<BTreeSet<VertexId>>(),
        );
    }
    if block_middle {
        below.extend(tails[1].iter().copied());
    }
    disjoint_paths(&t.graph, &tails[0], &tails[2], &below, 1)
}

/// Accepts when no path joins the outer tails around a girder of a
/// bidirected necklace grid once the middle tail is blocked.
pub fn check_girder_obstruction(host: &RayedHost, depth: usize) -> Result<Verdict> {
    let found = girder_crossings(host, depth, true)?;
    Ok(match found.first() {
        Some(p) => reject(
            RejectReason::PathFound,
            format!("path from {} to {}", p.first(), p.last()),
        ),
        None => Ok(()),
    })
}
