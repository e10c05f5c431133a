use std::collections::BTreeSet;

use super::{out_view, Staircase};
use crate::contraction::ContractionResult;
use crate::error::{Error, Result};
use crate::graph::{shortest_path, PathQuery, PathSeq, VertexId};
use crate::rays::{down_closure, Orientation, RayIndex, RayedHost, Truncation};

/// The spine segments of `c` from ray `u` to ray `v`, read in the out-view.
pub(crate) fn sigma_paths(c: &ContractionResult, u: RayIndex, v: RayIndex) -> Vec<PathSeq> {
    let (a, b) = match c.orientation {
        Orientation::Out => (u, v),
        Orientation::In => (v, u),
    };
    c.edges_between(a, b)
        .into_iter()
        .map(|e| match c.orientation {
            Orientation::Out => c.sigma[&e].clone(),
            Orientation::In => c.sigma[&e].reversed(),
        })
        .collect()
}

/// Whether `(u, v)` is an edge of the quotient, read in the out-view.
pub(crate) fn dinf_has(c: &ContractionResult, u: RayIndex, v: RayIndex) -> bool {
    let (a, b) = match c.orientation {
        Orientation::Out => (u, v),
        Orientation::In => (v, u),
    };
    c.dinf.graph.find_edge(a.vertex(), b.vertex()).is_some()
}

/// A path from ray `from` to ray `to` avoiding `forbidden`, whose interior
/// stays off the rays in `blocking` (every ray when `None`). Prefers the
/// earliest usable spine segment in `candidates`, then falls back to a search
/// of the truncation.
pub(crate) fn jump(
    t: &Truncation,
    from: RayIndex,
    to: RayIndex,
    forbidden: &BTreeSet<VertexId>,
    candidates: &[PathSeq],
    blocking: Option<&BTreeSet<RayIndex>>,
) -> Option<PathSeq> {
    let blocked = |v: VertexId| match (t.ray_position(v), blocking) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some((r, _)), Some(b)) => b.contains(&r) || r == from || r == to,
    };
    let ok = |p: &PathSeq| {
        t.ray_position(p.first()).map(|x| x.0) == Some(from)
            && t.ray_position(p.last()).map(|x| x.0) == Some(to)
            && p.vertices.iter().all(|v| !forbidden.contains(v))
            && p.interior().iter().all(|v| !blocked(*v))
            && p.check_in(&t.graph).is_ok()
    };
    if let Some(p) = candidates.iter().find(|p| ok(p)) {
        return Some(p.clone());
    }
    let sources = t.ray_vertex_set(from).ok()?;
    let targets = t.ray_vertex_set(to).ok()?;
    let open = |v: VertexId| !blocked(v);
    shortest_path(
        &t.graph,
        &PathQuery::new(&sources, &targets, forbidden).with_interior(&open),
    )
}

/// Appends a walk along the ray of `p`'s end followed by a jump to `next`.
/// Fails unless the jump starts strictly after the current end.
pub(crate) fn extend(t: &Truncation, stair: &mut Staircase, next_jump: PathSeq) -> Result<()> {
    let end = stair
        .segments
        .last()
        .expect("staircases start with a jump")
        .last();
    let (ray, pe) = t.ray_position(end).ok_or(Error::VertexNotOnRay(end))?;
    let (ray2, ps) = t
        .ray_position(next_jump.first())
        .ok_or(Error::VertexNotOnRay(next_jump.first()))?;
    if ray != ray2 || ps <= pe {
        return Err(Error::InvalidInput(
            "jump does not leave the ray above the previous arrival".into(),
        ));
    }
    let walk = t.ray(ray)?.segment(&t.graph, pe, ps)?;
    let to = t
        .ray_position(next_jump.last())
        .expect("jumps end on rays")
        .0;
    stair.segments.push(walk);
    stair.segments.push(next_jump);
    stair.sequence.push(to);
    stair.simple = stair.simple && stair.segments.iter().rev().take(2).all(|s| s.len() == 1);
    Ok(())
}

/// Builds a staircase through `a_seq` avoiding `x`, adding one jump per step
/// and keeping each new jump clear of the down-closure of what is placed.
///
/// For in-ray families the staircase is read in the reversed host, and so is
/// `a_seq`.
pub fn build_staircase(
    host: &RayedHost,
    c: &ContractionResult,
    a_seq: &[RayIndex],
    x: &BTreeSet<VertexId>,
    depth: usize,
) -> Result<Staircase> {
    if a_seq.len() < 2 {
        return Err(Error::InvalidInput("a staircase needs two rays".into()));
    }
    for w in a_seq.windows(2) {
        if !dinf_has(c, w[0], w[1]) {
            return Err(Error::NotDinfEdge(w[0], w[1]));
        }
    }
    let host = out_view(host);
    let t = host.truncate(depth);
    staircase_in(&t, c, a_seq, x)
}

/// As [`build_staircase`], on an out-view truncation.
pub(crate) fn staircase_in(
    t: &Truncation,
    c: &ContractionResult,
    a_seq: &[RayIndex],
    x: &BTreeSet<VertexId>,
) -> Result<Staircase> {
    let base = down_closure(x, &t.ray_indices(), t);
    climb(t, a_seq, &base, None, &|u, v| sigma_paths(c, u, v))
}

/// Staircase through `seq` whose jumps avoid `base` and the down-closure of
/// everything placed before them.
pub(crate) fn climb(
    t: &Truncation,
    seq: &[RayIndex],
    base: &BTreeSet<VertexId>,
    blocking: Option<&BTreeSet<RayIndex>>,
    candidates: &dyn Fn(RayIndex, RayIndex) -> Vec<PathSeq>,
) -> Result<Staircase> {
    let all = t.ray_indices();
    let stage = |j: usize| Error::obstruction(format!("staircase step {j}"), t.depth);
    let first = jump(
        t,
        seq[0],
        seq[1],
        base,
        &candidates(seq[0], seq[1]),
        blocking,
    )
    .ok_or_else(|| stage(1))?;
    let simple = first.len() == 1;
    let mut stair = Staircase {
        sequence: seq[..2].to_vec(),
        segments: vec![first],
        simple,
    };
    for j in 1..seq.len() - 1 {
        let mut forbidden = base.clone();
        forbidden.extend(down_closure(&stair.path().vertex_set(), &all, t));
        let p = jump(
            t,
            seq[j],
            seq[j + 1],
            &forbidden,
            &candidates(seq[j], seq[j + 1]),
            blocking,
        )
        .ok_or_else(|| stage(j + 1))?;
        extend(t, &mut stair, p)?;
    }
    Ok(stair)
}
