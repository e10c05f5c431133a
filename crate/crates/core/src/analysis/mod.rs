//! Structure of a ray family seen through its quotient, and the pipeline
//! from an equivalent family to a certified grid.

mod escape;
mod pipeline;
mod spines;
mod transform;

pub(crate) use spines::spine_of;
mod structure;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{strong_components, MultiDigraph, PathSeq, VertexId};
use crate::rays::{build_spine, Orientation, RayIndex, RayedHost, Spine, Truncation};

pub use escape::{escape_ray, Escape};
pub use pipeline::{
    main_pipeline, pipeline_along, AuditEntry, PipelineRun, RestrictedRoute, Route,
};
pub use spines::{
    find_avoiding_subfamily, pair_schedule, strongly_connecting_spine, AvoidingSpine,
};
pub use structure::{
    analyze_in_structure, analyze_out_structure, validate_path_family, Branch, FamilyDirection,
    FamilyPath, PathFamily, StructureVerdict,
};
pub use transform::{
    dominated_to_bidirected, transform_schedule, Connection, Transform, TransformState,
    WITNESS_PATHS,
};

/// The round-robin spine with the most rounds (up to a cap) that fits the
/// truncation.
pub fn longest_spine(host: &RayedHost, depth: usize) -> Result<Spine> {
    let rays = host.truncate(depth).rays.len().max(1);
    let cap = 4 * rays + 4;
    let mut best = build_spine(host, 1, depth)?;
    let (mut lo, mut hi) = (1, cap + 1);
    let mut r = 2;
    while r <= cap {
        match build_spine(host, r, depth) {
            Ok(s) => {
                best = s;
                lo = r;
                r *= 2;
            }
            Err(_) => {
                hi = r;
                break;
            }
        }
    }
    hi = hi.min(cap + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match build_spine(host, mid, depth) {
            Ok(s) => {
                best = s;
                lo = mid;
            }
            Err(_) => hi = mid,
        }
    }
    Ok(best)
}

/// The walk along the ray through `from` to `to`, following the ray's edges.
pub(crate) fn ray_walk(t: &Truncation, from: VertexId, to: VertexId) -> Option<PathSeq> {
    let (r, a) = t.ray_position(from)?;
    let (r2, b) = t.ray_position(to)?;
    let ray = &t.rays[&r];
    if r != r2 {
        return None;
    }
    match ray.orientation {
        Orientation::Out if a <= b => ray.segment(&t.graph, a, b).ok(),
        Orientation::In if a >= b => ray.segment(&t.graph, b, a).ok(),
        _ => None,
    }
}

/// Concatenates pieces that meet end to start.
pub(crate) fn join(pieces: &[&PathSeq]) -> Result<PathSeq> {
    let mut out = pieces
        .first()
        .map(|p| (*p).clone())
        .ok_or_else(|| Error::InvalidInput("nothing to join".into()))?;
    for p in &pieces[1..] {
        out = out.concat(p)?;
    }
    Ok(out)
}

/// The strong component of `g[within]` containing `v`.
pub(crate) fn component_in(
    g: &MultiDigraph,
    within: &BTreeSet<RayIndex>,
    v: RayIndex,
) -> BTreeSet<RayIndex> {
    let keep: BTreeSet<VertexId> = within.iter().map(|r| r.vertex()).collect();
    let sc = strong_components(&g.induced(&keep));
    sc.component_containing(v.vertex())
        .map(|c| c.iter().map(|x| RayIndex::from_vertex(*x)).collect())
        .unwrap_or_else(|| BTreeSet::from([v]))
}

#[cfg(test)]
mod tests;
