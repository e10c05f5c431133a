use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{join, ray_walk};
use crate::catalog::finite_host;
use crate::error::{Error, Result};
use crate::graph::{disjoint_paths, MultiDigraph, PathSeq, VertexId};
use crate::grids::{jump, out_view, Girder, GirderPart, GridCertificate, Staircase};
use crate::layout::GridKind;
use crate::rays::{
    down_closure, Certification, EquivalenceWitness, Orientation, RayIndex, RayPrefix, RayedHost,
    Truncation,
};

/// Disjoint paths each way demanded between a new vertical and its original ray.
pub const WITNESS_PATHS: usize = 3;

/// One scheduled connection between two new verticals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub step: usize,
    pub from: u32,
    pub to: u32,
    pub path: PathSeq,
    /// Found on the first ray after rerouting every vertical, rather than as
    /// a direct jump.
    pub rerouted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformState {
    /// The new verticals, level 1 first, as paths of the host.
    pub verticals: Vec<PathSeq>,
    /// Vertex counts of the verticals after each step.
    pub history: Vec<Vec<usize>>,
    pub connections: Vec<Connection>,
    pub schedule: Vec<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct Transform {
    /// The host's truncation with the new verticals as its ray family.
    pub host: RayedHost,
    pub graph: MultiDigraph,
    pub certificate: GridCertificate,
    /// Per level: `i` is the new vertical (a ray of `host`), `j` the original ray.
    pub witnesses: Vec<EquivalenceWitness>,
    pub state: TransformState,
}

/// Pairs of consecutive levels, one girder's worth at a time: up from 1 to
/// `k`, then back down, for `k = 2..=n`. The pair at step `m` (counting from
/// 2) never names a level above `m`.
pub fn transform_schedule(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for k in 2..=n {
        out.extend((1..k).map(|l| (l, l + 1)));
        out.extend((1..k).rev().map(|l| (l + 1, l)));
    }
    out
}

struct Builder<'a> {
    t: &'a Truncation,
    all: BTreeSet<RayIndex>,
    verticals: Vec<PathSeq>,
    used: BTreeSet<VertexId>,
    depth: usize,
}

impl Builder<'_> {
    fn closure(&self, x: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        down_closure(x, &self.all, self.t)
    }

    fn obstruction(&self, what: impl Into<String>) -> Error {
        Error::obstruction(what, self.depth)
    }

    fn end(&self, level: u32) -> VertexId {
        self.verticals[level as usize - 1].last()
    }

    fn add_used(&mut self, p: &PathSeq) {
        self.used.extend(p.vertices.iter().copied());
    }

    /// Appends `p`, which starts at the vertical's end.
    fn extend(&mut self, level: u32, p: &PathSeq) -> Result<()> {
        let s = &mut self.verticals[level as usize - 1];
        *s = join(&[s, p])?;
        self.used.extend(p.vertices.iter().copied());
        Ok(())
    }

    fn walk(&self, from: VertexId, to: VertexId) -> Result<PathSeq> {
        ray_walk(self.t, from, to)
            .ok_or_else(|| self.obstruction(format!("walk from {from} to {to}")))
    }

    /// A new vertical on ray `level`, rooted at the lowest free vertex.
    fn start_vertical(&mut self, level: u32) -> Result<()> {
        let below = self.closure(&self.used);
        let ray = self.t.ray(RayIndex(level))?;
        let root = *ray
            .vertices
            .iter()
            .find(|v| !below.contains(v))
            .ok_or_else(|| self.obstruction(format!("free vertex on ray {level}")))?;
        self.verticals.push(PathSeq::single(root));
        self.used.insert(root);
        Ok(())
    }
}

/// From `start` on ray `seq[0]`: a walk up, then jumps through `seq` in
/// order, each leaving strictly above the previous arrival. Nothing after
/// `start` may lie in `forbidden`.
fn staircase_from(
    t: &Truncation,
    start: VertexId,
    seq: &[u32],
    forbidden: &BTreeSet<VertexId>,
) -> Option<PathSeq> {
    let all = t.ray_indices();
    let mut path = PathSeq::single(start);
    for w in seq.windows(2) {
        let mut avoid = forbidden.clone();
        avoid.extend(down_closure(&path.vertex_set(), &all, t));
        let j = jump(t, RayIndex(w[0]), RayIndex(w[1]), &avoid, &[], None)?;
        let walk = ray_walk(t, path.last(), j.first())?;
        if walk.vertices[1..].iter().any(|v| forbidden.contains(v)) {
            return None;
        }
        path = join(&[&path, &walk, &j]).ok()?;
    }
    Some(path)
}

fn descending(from: u32, to: u32) -> Vec<u32> {
    (to..=from).rev().collect()
}

fn ascending(from: u32, to: u32) -> Vec<u32> {
    (from..=to).collect()
}

/// Last vertex of `p` on ray `r`, and first.
fn on_ray(t: &Truncation, p: &PathSeq, r: RayIndex) -> Option<(VertexId, VertexId)> {
    let mut hits = p
        .vertices
        .iter()
        .filter(|v| t.ray_position(**v).is_some_and(|(q, _)| q == r));
    let first = *hits.next()?;
    let last = hits.last().copied().unwrap_or(first);
    Some((first, last))
}

impl Builder<'_> {
    /// A jump between the ends' rays above everything used, if one exists.
    fn direct(&mut self, step: usize, a: u32, b: u32) -> Result<Option<Connection>> {
        let below = self.closure(&self.used);
        let Some(p) = jump(self.t, RayIndex(a), RayIndex(b), &below, &[], None) else {
            return Ok(None);
        };
        let (wa, wb) = (
            self.walk(self.end(a), p.first())?,
            self.walk(self.end(b), p.last())?,
        );
        self.extend(a, &wa)?;
        self.extend(b, &wb)?;
        self.add_used(&p);
        Ok(Some(Connection {
            step,
            from: a,
            to: b,
            path: p,
            rerouted: false,
        }))
    }

    /// Every vertical descends to ray 1 and leaves through an arch to its own
    /// far ray, then climbs back down to its level. Afterwards ray 1 holds the
    /// verticals in level order, so `a -> a + 1` is a piece of ray 1.
    fn reroute_inward(&mut self, step: usize, a: u32, b: u32) -> Result<Connection> {
        let n = self.verticals.len() as u32;
        let rays: Vec<u32> = self.all.iter().map(|r| r.0).collect();
        let base = self.closure(&self.used);
        let mut firsts: Vec<PathSeq> = Vec::new();
        let mut far: Vec<u32> = Vec::new();
        let mut placed = base.clone();
        for j in 1..=n {
            let lo = far.last().copied().unwrap_or(n);
            let q = rays.iter().filter(|f| **f > lo).find_map(|&f| {
                let down = staircase_from(self.t, self.end(j), &descending(j, 1), &placed)?;
                let mut avoid = placed.clone();
                avoid.extend(self.closure(&down.vertex_set()));
                let arch = jump(self.t, RayIndex(1), RayIndex(f), &avoid, &[], None)?;
                let walk = ray_walk(self.t, down.last(), arch.first())?;
                Some((f, join(&[&down, &walk, &arch]).ok()?))
            });
            let (f, q) =
                q.ok_or_else(|| self.obstruction(format!("inward reroute of level {j}")))?;
            placed.extend(self.closure(&q.vertex_set()));
            far.push(f);
            firsts.push(q);
        }
        let mut seconds: Vec<PathSeq> = Vec::new();
        for j in 1..=n {
            let q = &firsts[j as usize - 1];
            let back = staircase_from(
                self.t,
                q.last(),
                &descending(far[j as usize - 1], j),
                &placed,
            )
            .ok_or_else(|| self.obstruction(format!("inward return of level {j}")))?;
            placed.extend(self.closure(&back.vertex_set()));
            seconds.push(back);
        }
        for j in 1..=n {
            let (q, back) = (&firsts[j as usize - 1], &seconds[j as usize - 1]);
            self.extend(j, &join(&[q, back])?)?;
        }
        let (_, leave) =
            on_ray(self.t, &firsts[a as usize - 1], RayIndex(1)).expect("reroutes cross ray 1");
        let (arrive, _) =
            on_ray(self.t, &firsts[b as usize - 1], RayIndex(1)).expect("reroutes cross ray 1");
        self.finish_reroute(step, a, b, leave, arrive)
    }

    /// Every vertical climbs `n` rays, reaches a far ray whose arch returns
    /// to ray 1, and climbs back to its level. Higher levels use ray 1 first,
    /// so `a -> a - 1` is a piece of ray 1.
    fn reroute_outward(&mut self, step: usize, a: u32, b: u32) -> Result<Connection> {
        let n = self.verticals.len() as u32;
        let rays: Vec<u32> = self.all.iter().map(|r| r.0).collect();
        let base = self.closure(&self.used);
        let mut firsts: BTreeMap<u32, PathSeq> = BTreeMap::new();
        let mut placed = base.clone();
        for j in (1..=n).rev() {
            let q = staircase_from(self.t, self.end(j), &ascending(j, j + n), &placed)
                .ok_or_else(|| self.obstruction(format!("outward climb of level {j}")))?;
            placed.extend(self.closure(&q.vertex_set()));
            firsts.insert(j, q);
        }
        let mut seconds: BTreeMap<u32, PathSeq> = BTreeMap::new();
        for j in (1..=n).rev() {
            let start = firsts[&j].last();
            let q = rays.iter().filter(|f| **f >= j + n).find_map(|&f| {
                let up = staircase_from(self.t, start, &ascending(j + n, f), &placed)?;
                let mut avoid = placed.clone();
                avoid.extend(self.closure(&up.vertex_set()));
                let arch = jump(self.t, RayIndex(f), RayIndex(1), &avoid, &[], None)?;
                let walk = ray_walk(self.t, up.last(), arch.first())?;
                let head = join(&[&up, &walk, &arch]).ok()?;
                avoid.extend(self.closure(&head.vertex_set()));
                avoid.remove(&head.last());
                let climb = staircase_from(self.t, head.last(), &ascending(1, j), &avoid)?;
                join(&[&head, &climb]).ok()
            });
            let q = q.ok_or_else(|| self.obstruction(format!("outward return of level {j}")))?;
            placed.extend(self.closure(&q.vertex_set()));
            seconds.insert(j, q);
        }
        for j in 1..=n {
            self.extend(j, &join(&[&firsts[&j], &seconds[&j]])?)?;
        }
        let (_, leave) = on_ray(self.t, &seconds[&a], RayIndex(1)).expect("returns cross ray 1");
        let (arrive, _) = on_ray(self.t, &seconds[&b], RayIndex(1)).expect("returns cross ray 1");
        self.finish_reroute(step, a, b, leave, arrive)
    }

    fn finish_reroute(
        &mut self,
        step: usize,
        a: u32,
        b: u32,
        leave: VertexId,
        arrive: VertexId,
    ) -> Result<Connection> {
        let p = self.walk(leave, arrive)?;
        if p.interior().iter().any(|v| self.used.contains(v)) {
            return Err(self.obstruction(format!(
                "ray 1 piece from level {a} to level {b} is not free"
            )));
        }
        self.add_used(&p);
        Ok(Connection {
            step,
            from: a,
            to: b,
            path: p,
            rerouted: true,
        })
    }
}

/// Rebuilds a grid-bearing end as a bidirected one: new verticals, one per
/// level, that stay equivalent to the original rays but are joined both ways
/// between consecutive levels. Pairs with a free direct jump use it; the
/// others are found on the first ray after every vertical has been rerouted
/// through it. Works in the out-view, so in-families come back reversed.
pub fn dominated_to_bidirected(host: &RayedHost, n: u32, depth: usize) -> Result<Transform> {
    if n < 2 {
        return Err(Error::BadParameters(format!(
            "need at least 2 levels, got {n}"
        )));
    }
    let hv = out_view(host);
    let t = hv.truncate(depth);
    let all = t.ray_indices();
    if (all.len() as u32) < n {
        return Err(Error::obstruction(format!("{n} rays"), depth));
    }
    let schedule = transform_schedule(n);
    let mut b = Builder {
        t: &t,
        all,
        verticals: Vec::new(),
        used: BTreeSet::new(),
        depth,
    };
    b.start_vertical(1)?;
    let mut connections = Vec::new();
    let mut history = Vec::new();
    for (step, &(from, to)) in schedule.iter().enumerate() {
        while (b.verticals.len() as u32) < from.max(to) {
            b.start_vertical(b.verticals.len() as u32 + 1)?;
        }
        let c = match b.direct(step, from, to)? {
            Some(c) => c,
            None if to == from + 1 => b.reroute_inward(step, from, to)?,
            None => b.reroute_outward(step, from, to)?,
        };
        connections.push(c);
        history.push(b.verticals.iter().map(|s| s.vertices.len()).collect());
    }
    // one more step up every vertical, so no branch vertex is a vertical's tip
    for level in 1..=n {
        let end = b.end(level);
        let ray = t.ray(RayIndex(level))?;
        let next = ray
            .position(end)
            .and_then(|p| ray.vertices.get(p + 1))
            .copied();
        let next = next
            .filter(|v| !b.used.contains(v))
            .ok_or_else(|| b.obstruction(format!("tip of vertical {level}")))?;
        let w = b.walk(end, next)?;
        b.extend(level, &w)?;
    }
    history.push(b.verticals.iter().map(|s| s.vertices.len()).collect());
    let verticals = b.verticals;
    let certificate = assemble(&verticals, &connections, n, depth)?;
    let rays: BTreeMap<RayIndex, RayPrefix> = verticals
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let index = RayIndex(k as u32 + 1);
            (
                index,
                RayPrefix {
                    index,
                    orientation: Orientation::Out,
                    vertices: s.vertices.clone(),
                },
            )
        })
        .collect();
    let mut witnesses = Vec::new();
    for (k, s) in verticals.iter().enumerate() {
        let index = RayIndex(k as u32 + 1);
        // shared vertices count as trivial paths; the two rays overlap in
        // their walks
        let new = s.vertex_set();
        let old = t.ray_vertex_set(index)?;
        let none = BTreeSet::new();
        let forward = disjoint_paths(&t.graph, &new, &old, &none, WITNESS_PATHS)?;
        let backward = disjoint_paths(&t.graph, &old, &new, &none, WITNESS_PATHS)?;
        if forward.len() < WITNESS_PATHS || backward.len() < WITNESS_PATHS {
            return Err(Error::obstruction(
                format!("equivalence of vertical {} with its ray", k + 1),
                depth,
            ));
        }
        witnesses.push(EquivalenceWitness {
            i: index,
            j: index,
            forward,
            backward,
            depth,
        });
    }
    let state = TransformState {
        verticals,
        history,
        connections,
        schedule,
    };
    let transformed = finite_host(
        "transformed",
        t.graph.clone(),
        rays,
        Orientation::Out,
        Certification::default(),
    );
    let graph = certificate.subgraph(&t.graph);
    Ok(match host.orientation {
        Orientation::Out => Transform {
            host: transformed,
            graph,
            certificate,
            witnesses,
            state,
        },
        Orientation::In => {
            let witnesses = witnesses
                .into_iter()
                .map(|w| EquivalenceWitness {
                    forward: w.backward.iter().map(PathSeq::reversed).collect(),
                    backward: w.forward.iter().map(PathSeq::reversed).collect(),
                    ..w
                })
                .collect();
            Transform {
                host: transformed.reversed(),
                graph: graph.reverse(),
                certificate: GridCertificate {
                    orientation: Orientation::In,
                    ..certificate
                },
                witnesses,
                state,
            }
        }
    })
}

/// Girder `k` climbs through the connections `1 -> 2 -> .. -> k`, steps up
/// vertical `k` and comes back down through `k -> .. -> 1`, walking up each
/// vertical between consecutive connections.
fn assemble(
    verticals: &[PathSeq],
    connections: &[Connection],
    n: u32,
    depth: usize,
) -> Result<GridCertificate> {
    let piece = |level: u32, from: VertexId, to: VertexId| -> Result<PathSeq> {
        let s = &verticals[level as usize - 1];
        match (s.position(from), s.position(to)) {
            (Some(a), Some(b)) if a < b => Ok(s.slice(a, b)),
            _ => Err(Error::obstruction(
                format!("walk up vertical {level} from {from} to {to}"),
                depth,
            )),
        }
    };
    let staircase = |conns: &[Connection], sequence: Vec<u32>| -> Result<Staircase> {
        let mut segments = vec![conns[0].path.clone()];
        for w in conns.windows(2) {
            segments.push(piece(w[0].to, w[0].path.last(), w[1].path.first())?);
            segments.push(w[1].path.clone());
        }
        Ok(Staircase {
            sequence: sequence.into_iter().map(RayIndex).collect(),
            segments,
            simple: false,
        })
    };
    let mut girders = Vec::new();
    let mut at = 0;
    for k in 2..=n {
        let block = &connections[at..at + 2 * (k as usize - 1)];
        at += block.len();
        let (up, down) = block.split_at(k as usize - 1);
        let top = piece(k, up[up.len() - 1].path.last(), down[0].path.first())?;
        girders.push(Girder {
            level: k,
            parts: vec![
                GirderPart::Staircase {
                    staircase: staircase(up, ascending(1, k))?,
                },
                GirderPart::RayStep { path: top },
                GirderPart::Staircase {
                    staircase: staircase(down, descending(k, 1))?,
                },
            ],
        });
    }
    let verticals = verticals
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let level = k as u32 + 1;
            (
                level,
                RayPrefix {
                    index: RayIndex(level),
                    orientation: Orientation::Out,
                    vertices: s.vertices.clone(),
                },
            )
        })
        .collect();
    Ok(GridCertificate {
        kind: GridKind::BidirectedQG,
        orientation: Orientation::Out,
        verticals,
        girders,
        depth,
    })
}
