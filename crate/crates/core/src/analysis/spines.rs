use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{join, ray_walk, FamilyDirection, PathFamily};
use crate::error::{Error, Result};
use crate::graph::{shortest_path, PathQuery, PathSeq, VertexId};
use crate::grids::{jump, out_view};
use crate::rays::{down_closure, Orientation, RayIndex, RayedHost, Spine, Truncation};

/// Wraps an out-view path as a spine of `orientation`'s family.
pub(crate) fn spine_of(
    t: &Truncation,
    path: PathSeq,
    orientation: Orientation,
    depth: usize,
) -> Spine {
    let mut visits: BTreeMap<RayIndex, Vec<VertexId>> = BTreeMap::new();
    let mut rounds = Vec::new();
    let mut arrivals = Vec::new();
    let mut last = None;
    for (k, v) in path.vertices.iter().enumerate() {
        if let Some((r, _)) = t.ray_position(*v) {
            visits.entry(r).or_default().push(*v);
            if last != Some(r) {
                rounds.push(r);
                arrivals.push(k);
            }
            last = Some(r);
        }
    }
    let path = match orientation {
        Orientation::Out => path,
        Orientation::In => path.reversed(),
    };
    Spine {
        orientation,
        path,
        visits,
        rounds,
        arrivals,
        depth,
    }
}

/// A spine over a subfamily that never touches the cut-off initial pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidingSpine {
    /// Rays in the order they joined; the first is the home ray.
    pub indices: Vec<RayIndex>,
    pub spine: Spine,
}

/// Grows a spine that keeps returning to a home ray, adding one ray per
/// round whose initial piece up to its cut vertex is still untouched, and
/// visiting every ray added so far in each round. Tours favour pairs used
/// least so far, so no pair of rays is forced to repeat.
pub fn find_avoiding_subfamily(
    host: &RayedHost,
    cuts: &BTreeMap<RayIndex, VertexId>,
    size: usize,
    depth: usize,
) -> Result<AvoidingSpine> {
    let hv = out_view(host);
    let t = hv.truncate(depth);
    let all = t.ray_indices();
    let mut initial: BTreeMap<RayIndex, BTreeSet<VertexId>> = BTreeMap::new();
    for (&r, &v) in cuts {
        let ray = t.ray(r)?;
        let p = ray
            .position(v)
            .ok_or_else(|| Error::obstruction(format!("cut vertex {v} of ray {r}"), depth))?;
        initial.insert(r, ray.vertices[..=p].iter().copied().collect());
    }
    let home = *cuts
        .keys()
        .next()
        .ok_or_else(|| Error::InvalidInput("no cut vertices".into()))?;
    let home_ray = t.ray(home)?;
    let start = *home_ray
        .vertices
        .get(initial[&home].len())
        .ok_or_else(|| Error::obstruction("start above the home cut", depth))?;
    let mut members = vec![home];
    let mut path = PathSeq::single(start);
    let mut uses = BTreeMap::new();
    // Rounds continue past `size` for as long as the truncation allows, so
    // that every pair of members recurs; a member is added whenever a fresh
    // ray is still available.
    loop {
        let pv = path.vertex_set();
        let fresh = cuts
            .keys()
            .copied()
            .find(|i| !members.contains(i) && initial[i].is_disjoint(&pv));
        if fresh.is_none() && members.len() < size {
            return Err(Error::obstruction(
                format!("fresh ray for round {}", members.len()),
                depth,
            ));
        }
        let mut next = members.clone();
        next.extend(fresh);
        let mut trial = uses.clone();
        match avoiding_round(&t, &all, &initial, home, &next, &path, &mut trial, depth) {
            Ok(p) => {
                path = p;
                members = next;
                uses = trial;
            }
            Err(e) if members.len() < size => return Err(e),
            Err(_) => break,
        }
    }
    Ok(AvoidingSpine {
        indices: members,
        spine: spine_of(&t, path, host.orientation, depth),
    })
}

/// One tour from the end of `path` through every member and back home,
/// clear of everything below the path so far and of the initial pieces.
#[allow(clippy::too_many_arguments)]
fn avoiding_round(
    t: &Truncation,
    all: &BTreeSet<RayIndex>,
    initial: &BTreeMap<RayIndex, BTreeSet<VertexId>>,
    home: RayIndex,
    members: &[RayIndex],
    path: &PathSeq,
    uses: &mut BTreeMap<(RayIndex, RayIndex), usize>,
    depth: usize,
) -> Result<PathSeq> {
    let none = BTreeSet::new();
    let mut avoid = down_closure(&path.vertex_set(), all, t);
    for m in members {
        avoid.extend(initial[m].iter().copied());
    }
    let tour = spread_tour(home, members, uses);
    let mut pieces: Vec<PathSeq> = Vec::new();
    for w in tour.windows(2) {
        // keep clear of every initial piece while that is possible, so that
        // later rounds still find fresh rays
        let mut strict = avoid.clone();
        strict.extend(initial.values().flatten().copied());
        let j = jump(t, w[0], w[1], &strict, &[], Some(&none))
            .or_else(|| jump(t, w[0], w[1], &avoid, &[], Some(&none)))
            .ok_or_else(|| {
                Error::obstruction(
                    format!("round {} jump {}->{}", members.len() - 1, w[0], w[1]),
                    depth,
                )
            })?;
        avoid.extend(down_closure(&j.vertex_set(), all, t));
        if let Some(prev) = pieces.last() {
            let walk = ray_walk(t, prev.last(), j.first())
                .ok_or_else(|| Error::obstruction("walk between jumps", depth))?;
            pieces.push(walk);
        }
        pieces.push(j);
    }
    let walk = ray_walk(t, path.last(), pieces[0].first())
        .ok_or_else(|| Error::obstruction("walk on the home ray", depth))?;
    let mut all_pieces: Vec<&PathSeq> = vec![path, &walk];
    all_pieces.extend(pieces.iter());
    join(&all_pieces)
}

/// A closed tour from `home` through every member, taking at each step the
/// least used pair so far (smallest index on ties).
fn spread_tour(
    home: RayIndex,
    members: &[RayIndex],
    uses: &mut BTreeMap<(RayIndex, RayIndex), usize>,
) -> Vec<RayIndex> {
    let mut left: BTreeSet<RayIndex> = members.iter().copied().filter(|m| *m != home).collect();
    let mut tour = vec![home];
    let mut here = home;
    while let Some(&next) = left
        .iter()
        .min_by_key(|r| (uses.get(&(here, **r)).copied().unwrap_or(0), **r))
    {
        left.remove(&next);
        *uses.entry((here, next)).or_default() += 1;
        tour.push(next);
        here = next;
    }
    *uses.entry((here, home)).or_default() += 1;
    tour.push(home);
    tour
}

/// Orders the ordered pairs of `window` diagonal by diagonal and chains them
/// into one visiting sequence, `rounds` times over.
pub fn pair_schedule(window: &[RayIndex], rounds: usize) -> Vec<RayIndex> {
    let n = window.len();
    let mut pairs = Vec::new();
    for d in 1..n {
        for i in 0..n - d {
            pairs.push((window[i], window[i + d]));
            pairs.push((window[i + d], window[i]));
        }
    }
    let mut seq: Vec<RayIndex> = Vec::new();
    for _ in 0..rounds {
        for &(a, b) in &pairs {
            if seq.last() != Some(&a) {
                seq.push(a);
            }
            seq.push(b);
        }
    }
    if seq.is_empty() {
        seq.extend(window.first());
    }
    seq
}

/// A spine over `window` that passes between every ordered pair of its rays
/// `rounds` times. Each passage leaves through a forward path into a fresh
/// reserve ray, walks up it and returns through a backward path, all clear of
/// the down-closure (over the window) of the spine so far.
pub fn strongly_connecting_spine(
    host: &RayedHost,
    forward: &PathFamily,
    backward: &PathFamily,
    window: &[RayIndex],
    reserve: &[RayIndex],
    rounds: usize,
    depth: usize,
) -> Result<Spine> {
    if forward.direction != FamilyDirection::Forward
        || backward.direction != FamilyDirection::Backward
    {
        return Err(Error::InvalidInput(
            "expected a forward and a backward family".into(),
        ));
    }
    if window.is_empty() || window.iter().any(|w| reserve.contains(w)) {
        return Err(Error::BadParameters(
            "window must be nonempty and disjoint from the reserve".into(),
        ));
    }
    let (fwd, bwd) = match host.orientation {
        Orientation::Out => (forward.clone(), backward.clone()),
        Orientation::In => (backward.reversed(), forward.reversed()),
    };
    let hv = out_view(host);
    let t = hv.truncate(depth);
    let i4: BTreeSet<RayIndex> = window.iter().copied().collect();
    let seq = pair_schedule(window, rounds);
    let mut path = PathSeq::single(t.ray(seq[0])?.root());
    for w in seq.windows(2) {
        let (a, b) = (w[0], w[1]);
        let below = down_closure(&path.vertex_set(), &i4, &t);
        let passage = reserve
            .iter()
            .filter(|m| **m > a && **m > b)
            .find_map(|&m| {
                let p = fwd.get(a, m)?;
                let q = bwd.get(m, b)?;
                let rm = t.ray_vertex_set(m).ok()?;
                if !rm.is_disjoint(&below)
                    || !p.vertex_set().is_disjoint(&below)
                    || !q.vertex_set().is_disjoint(&below)
                {
                    return None;
                }
                let mut room: BTreeSet<VertexId> = rm;
                room.extend(p.vertices.iter().copied());
                room.extend(q.vertices.iter().copied());
                let inside = |v: VertexId| {
                    room.contains(&v) && !t.ray_position(v).is_some_and(|(r, _)| i4.contains(&r))
                };
                let (from, to) = (BTreeSet::from([p.first()]), BTreeSet::from([q.last()]));
                let none = BTreeSet::new();
                shortest_path(
                    &t.graph,
                    &PathQuery::new(&from, &to, &none).with_interior(&inside),
                )
            });
        let o = passage.ok_or(Error::ReserveExhausted)?;
        let walk = ray_walk(&t, path.last(), o.first())
            .ok_or_else(|| Error::obstruction(format!("walk on ray {a}"), depth))?;
        path = join(&[&path, &walk, &o])?;
    }
    Ok(spine_of(&t, path, host.orientation, depth))
}
