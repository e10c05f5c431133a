use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{down_closure, Orientation, RayIndex, RayedHost, Truncation};
use crate::error::{Error, Result};
use crate::graph::{shortest_path, PathQuery, PathSeq, VertexId};

/// Cyclic visiting order of rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule(pub Vec<RayIndex>);

impl Schedule {
    /// Round-robin over the given rays in ascending order.
    pub fn round_robin(rays: impl IntoIterator<Item = RayIndex>) -> Self {
        let mut v: Vec<_> = rays.into_iter().collect();
        v.sort();
        v.dedup();
        Schedule(v)
    }

    /// The ray for round `n` (1-based).
    pub fn at(&self, n: usize) -> RayIndex {
        self.0[(n - 1) % self.0.len()]
    }
}

/// A spine prefix: a path through the host meeting the scheduled rays in turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spine {
    pub orientation: Orientation,
    /// The spine as a directed path of the host. For in-ray families the
    /// root is the last vertex.
    pub path: PathSeq,
    /// Spine vertices on each ray, in order along the ray.
    pub visits: BTreeMap<RayIndex, Vec<VertexId>>,
    /// Rays used in rounds 1..=rounds.
    pub rounds: Vec<RayIndex>,
    /// Position (root-first) of the vertex where each round arrived.
    pub arrivals: Vec<usize>,
    pub depth: usize,
}

impl Spine {
    /// Spine vertices from the root outwards.
    pub fn root_first(&self) -> Vec<VertexId> {
        let mut v = self.path.vertices.clone();
        if self.orientation == Orientation::In {
            v.reverse();
        }
        v
    }

    /// The spine as a path of the reversed host when the family is of in-rays.
    pub fn root_first_path(&self) -> PathSeq {
        match self.orientation {
            Orientation::Out => self.path.clone(),
            Orientation::In => self.path.reversed(),
        }
    }

    pub fn visit_count(&self, r: RayIndex) -> usize {
        self.visits.get(&r).map_or(0, Vec::len)
    }
}

/// Spine over every ray of the depth-`depth` truncation, round-robin.
pub fn build_spine(host: &RayedHost, rounds: usize, depth: usize) -> Result<Spine> {
    let t = host.truncate(depth);
    let schedule = Schedule::round_robin(t.ray_indices());
    build_spine_with(host, rounds, depth, &schedule, &BTreeSet::new())
}

/// Spine following `schedule`, never touching `avoid`.
pub fn build_spine_with(
    host: &RayedHost,
    rounds: usize,
    depth: usize,
    schedule: &Schedule,
    avoid: &BTreeSet<VertexId>,
) -> Result<Spine> {
    if rounds == 0 || schedule.0.is_empty() {
        return Err(Error::InvalidInput(
            "spine needs at least one round and one ray".into(),
        ));
    }
    let t = host.truncate(depth);
    let out_view;
    let t: &Truncation = if host.orientation == Orientation::In {
        out_view = t.reversed();
        &out_view
    } else {
        &t
    };
    let (path, arrivals) = spine_out(t, rounds, schedule, avoid)?;
    let mut visits: BTreeMap<RayIndex, Vec<VertexId>> = BTreeMap::new();
    for v in &path.vertices {
        if let Some((r, _)) = t.ray_position(*v) {
            visits.entry(r).or_default().push(*v);
        }
    }
    let path = match host.orientation {
        Orientation::Out => path,
        Orientation::In => path.reversed(),
    };
    Ok(Spine {
        orientation: host.orientation,
        path,
        visits,
        rounds: (1..=rounds).map(|n| schedule.at(n)).collect(),
        arrivals,
        depth,
    })
}

fn spine_out(
    t: &Truncation,
    rounds: usize,
    schedule: &Schedule,
    avoid: &BTreeSet<VertexId>,
) -> Result<(PathSeq, Vec<usize>)> {
    let all = t.ray_indices();
    let first = t.ray(schedule.at(1))?;
    let start = first
        .vertices
        .iter()
        .copied()
        .find(|v| !avoid.contains(v))
        .ok_or_else(|| Error::obstruction("spine round 1", t.depth))?;
    let mut path = PathSeq::single(start);
    let mut arrivals = vec![0];
    for n in 1..rounds {
        let (cur, next) = (schedule.at(n), schedule.at(n + 1));
        let x = path.last();
        let ray = t.ray(cur)?;
        let px = ray.position(x).expect("spine arrivals lie on their ray");
        let mut blocked = down_closure(&path.vertex_set(), &all, t);
        blocked.extend(avoid.iter().copied());
        let stage = || Error::obstruction(format!("spine round {}", n + 1), t.depth);
        if cur == next {
            let y = *ray.vertices.get(px + 1).ok_or_else(stage)?;
            if avoid.contains(&y) {
                return Err(stage());
            }
            path = path.concat(&ray.segment(&t.graph, px, px + 1)?)?;
            arrivals.push(path.len());
            continue;
        }
        // the connecting path may start anywhere on the ray after x
        let sources: BTreeSet<VertexId> = ray.vertices[px..]
            .iter()
            .copied()
            .filter(|v| *v == x || !blocked.contains(v))
            .collect();
        let targets = t.ray_vertex_set(next)?;
        let mut q_forbidden = blocked.clone();
        q_forbidden.remove(&x);
        let q = shortest_path(&t.graph, &PathQuery::new(&sources, &targets, &q_forbidden))
            .ok_or_else(stage)?;
        let py = ray.position(q.first()).expect("source on ray");
        // the walk along the ray must also avoid everything blocked
        if ray.vertices[px + 1..=py]
            .iter()
            .any(|v| blocked.contains(v))
        {
            return Err(stage());
        }
        let o = ray.segment(&t.graph, px, py)?;
        path = path.concat(&o)?.concat(&q)?;
        arrivals.push(path.len());
    }
    Ok((path, arrivals))
}
