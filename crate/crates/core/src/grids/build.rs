use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::staircase::{climb, dinf_has, jump, sigma_paths};
use super::{out_view, Girder, GirderPart, GridCertificate, Shape, Staircase, TreeLikeModel};
use crate::contraction::{contract_with, degree_dichotomy, ContractionResult, Dichotomy};
use crate::error::{Error, Result};
use crate::graph::{strong_components, MultiDigraph, PathSeq, VertexId};
use crate::layout::GridKind;
use crate::rays::{
    down_closure, Certification, Orientation, PairPattern, RayIndex, RayedHost, Spine, Truncation,
};

/// The quotient of `c` with edges read in the out-view.
pub(crate) fn dinf_out_view(c: &ContractionResult) -> MultiDigraph {
    match c.orientation {
        Orientation::Out => c.dinf.graph.clone(),
        Orientation::In => c.dinf.graph.reverse(),
    }
}

/// Out-view direction matching `dir` for a contraction of orientation `o`.
fn view_direction(o: Orientation, dir: Orientation) -> Orientation {
    match o {
        Orientation::Out => dir,
        Orientation::In => dir.flip(),
    }
}

/// Merges the stretches of `s` spent on rays outside `keep` into jumps, so
/// that `s` reads as a staircase over the rays of `keep` only.
pub(crate) fn regroup(s: &Staircase, keep: &BTreeSet<RayIndex>) -> Staircase {
    let k = s.sequence.len() - 1;
    let mut segments = Vec::new();
    let mut sequence = vec![s.sequence[0]];
    let mut cur = s.segments[0].clone();
    for j in 1..k {
        let (q, p) = (&s.segments[2 * j - 1], &s.segments[2 * j]);
        if keep.contains(&s.sequence[j]) {
            segments.push(cur);
            segments.push(q.clone());
            sequence.push(s.sequence[j]);
            cur = p.clone();
        } else {
            cur.vertices.extend_from_slice(&q.vertices[1..]);
            cur.edges.extend_from_slice(&q.edges);
            cur.vertices.extend_from_slice(&p.vertices[1..]);
            cur.edges.extend_from_slice(&p.edges);
        }
    }
    segments.push(cur);
    sequence.push(s.sequence[k]);
    let simple = segments.iter().all(|p| p.len() == 1);
    Staircase {
        sequence,
        segments,
        simple,
    }
}

/// Walk up ray `r` from `a` to `b`.
fn ray_walk(t: &Truncation, a: VertexId, b: VertexId) -> Result<PathSeq> {
    let (r, pa) = t.ray_position(a).ok_or(Error::VertexNotOnRay(a))?;
    let (r2, pb) = t.ray_position(b).ok_or(Error::VertexNotOnRay(b))?;
    if r != r2 || pb <= pa {
        return Err(Error::obstruction("ray step", t.depth));
    }
    t.ray(r)?.segment(&t.graph, pa, pb)
}

/// Roots and tips of every ray: girders must stay clear of both.
fn ray_ends(t: &Truncation) -> BTreeSet<VertexId> {
    t.rays.values().flat_map(|r| [r.root(), r.tip()]).collect()
}

/// Girders grow bottom-up; each new one avoids the down-closure of all
/// earlier ones.
struct Draft {
    t: Arc<Truncation>,
    all: BTreeSet<RayIndex>,
    closure: BTreeSet<VertexId>,
    ends: BTreeSet<VertexId>,
    girders: Vec<Girder>,
}

impl Draft {
    fn new(t: Arc<Truncation>) -> Self {
        let ends = ray_ends(&t);
        Draft {
            all: t.ray_indices(),
            t,
            closure: BTreeSet::new(),
            ends,
            girders: Vec::new(),
        }
    }

    fn base(&self) -> BTreeSet<VertexId> {
        self.closure.union(&self.ends).copied().collect()
    }

    fn close(&self, x: &PathSeq) -> BTreeSet<VertexId> {
        down_closure(&x.vertex_set(), &self.all, &self.t)
    }

    fn push(&mut self, g: Girder) {
        let c = self.close(&g.path());
        self.closure.extend(c);
        self.girders.push(g);
    }

    fn finish(
        self,
        kind: GridKind,
        orientation: Orientation,
        order: &[RayIndex],
    ) -> Result<(MultiDigraph, GridCertificate)> {
        let mut verticals = BTreeMap::new();
        for (k, r) in order.iter().enumerate() {
            verticals.insert(k as u32 + 1, self.t.ray(*r)?.clone());
        }
        let cert = GridCertificate {
            kind,
            orientation,
            verticals,
            girders: self.girders,
            depth: self.t.depth,
        };
        let mut g = cert.subgraph(&self.t.graph);
        if orientation == Orientation::In {
            g = g.reverse();
        }
        Ok((g, cert))
    }
}

/// Girder at level `order.len()` over verticals `order`, jumps staying off
/// the verticals in `verts`.
fn model_girder(
    d: &Draft,
    kind: GridKind,
    order: &[RayIndex],
    verts: &BTreeSet<RayIndex>,
    cands: &dyn Fn(RayIndex, RayIndex) -> Vec<PathSeq>,
) -> Result<Girder> {
    let t = &d.t;
    let level = order.len() as u32;
    let down: Vec<RayIndex> = order.iter().rev().copied().collect();
    let (first, own) = (order[0], order[order.len() - 1]);
    let base = d.base();
    let stage = || Error::obstruction(format!("girder {level}"), t.depth);
    let parts = match kind {
        GridKind::BidirectedQG => {
            let up = climb(t, order, &base, Some(verts), cands)?;
            let mut avoid = base.clone();
            avoid.extend(d.close(&up.path()));
            let back = climb(t, &down, &avoid, Some(verts), cands)?;
            let step = ray_walk(t, up.path().last(), back.path().first())?;
            vec![
                GirderPart::Staircase { staircase: up },
                GirderPart::RayStep { path: step },
                GirderPart::Staircase { staircase: back },
            ]
        }
        GridKind::OutwardDDQG => {
            let up = climb(t, order, &base, Some(verts), cands)?;
            let mut avoid = base.clone();
            avoid.extend(d.close(&up.path()));
            let arch =
                jump(t, own, first, &avoid, &cands(own, first), Some(verts)).ok_or_else(stage)?;
            let step = ray_walk(t, up.path().last(), arch.first())?;
            vec![
                GirderPart::Staircase { staircase: up },
                GirderPart::RayStep { path: step },
                GirderPart::Arch { path: arch },
            ]
        }
        GridKind::InwardDDQG => {
            let arch =
                jump(t, first, own, &base, &cands(first, own), Some(verts)).ok_or_else(stage)?;
            let mut avoid = base.clone();
            avoid.extend(d.close(&arch));
            let back = climb(t, &down, &avoid, Some(verts), cands)?;
            let step = ray_walk(t, arch.last(), back.path().first())?;
            vec![
                GirderPart::Arch { path: arch },
                GirderPart::RayStep { path: step },
                GirderPart::Staircase { staircase: back },
            ]
        }
    };
    Ok(Girder { level, parts })
}

/// Builds an `n`-level grid whose verticals are the family rays at the roots
/// of a model found in the quotient. A star's centre carries no vertical;
/// jumps between its leaves run along the centre's ray instead.
pub fn grid_from_strong_component(
    host: &RayedHost,
    c: &ContractionResult,
    model: &TreeLikeModel,
    n: u32,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    if n < 2 {
        return Err(Error::BadParameters("a grid needs two levels".into()));
    }
    let shape = model
        .shape
        .ok_or_else(|| Error::InvalidInput("model has no shape".into()))?;
    let root = |k: u64| {
        model
            .root(VertexId(k))
            .map(RayIndex::from_vertex)
            .ok_or(Error::InsufficientModel(n as usize))
    };
    let (kind, order): (GridKind, Vec<RayIndex>) = match shape {
        Shape::BidirectedPath { len } if len >= n => (
            GridKind::BidirectedQG,
            (0..n as u64).map(root).collect::<Result<_>>()?,
        ),
        Shape::BidirectedStar { leaves } if leaves >= n => (
            GridKind::BidirectedQG,
            (1..=n as u64).map(root).collect::<Result<_>>()?,
        ),
        Shape::DominatedDirectedPath { len, orientation } if len >= n => {
            let kind = match view_direction(c.orientation, orientation) {
                Orientation::Out => GridKind::OutwardDDQG,
                Orientation::In => GridKind::InwardDDQG,
            };
            (kind, (0..n as u64).map(root).collect::<Result<_>>()?)
        }
        _ => return Err(Error::InsufficientModel(n as usize)),
    };
    let t = out_view(host).truncate(depth);
    let verts: BTreeSet<RayIndex> = order.iter().copied().collect();
    let mut d = Draft::new(t);
    let cands = |u: RayIndex, v: RayIndex| sigma_paths(c, u, v);
    for m in 2..=n as usize {
        let g = model_girder(&d, kind, &order[..m], &verts, &cands)?;
        d.push(g);
    }
    d.finish(kind, c.orientation, &order)
}

/// Checks that consecutive entries of `seq` are quotient edges (out-view).
fn check_chain(c: &ContractionResult, seq: &[RayIndex]) -> Result<()> {
    for w in seq.windows(2) {
        if !dinf_has(c, w[0], w[1]) {
            return Err(Error::NotDinfEdge(w[0], w[1]));
        }
    }
    Ok(())
}

/// The strong component of the quotient restricted to `within` containing `v`.
fn component_of(dv: &MultiDigraph, within: &BTreeSet<RayIndex>, v: RayIndex) -> BTreeSet<RayIndex> {
    let keep: BTreeSet<VertexId> = within.iter().map(|r| r.vertex()).collect();
    let sc = strong_components(&dv.induced(&keep));
    sc.component_containing(v.vertex())
        .map(|c| c.iter().map(|x| RayIndex::from_vertex(*x)).collect())
        .unwrap_or_else(|| BTreeSet::from([v]))
}

/// Inward dominated grid from an in-ray of the quotient.
///
/// `in_ray` lists the in-ray root first; each entry is entered from the next.
/// The first vertical is a ray of the root's strong component with unbounded
/// out-degree (certified, or at least `n - 1` observed neighbours). Arches
/// are spine segments out of it, and each girder closes with a staircase
/// descending through every intermediate ray of the in-ray.
pub fn grid_from_in_ray(
    host: &RayedHost,
    c: &ContractionResult,
    in_ray: &[RayIndex],
    n: u32,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    if n < 2 || in_ray.len() < n as usize {
        return Err(Error::BadParameters(
            "need n >= 2 and an in-ray of at least n rays".into(),
        ));
    }
    let pointing_down: Vec<RayIndex> = in_ray.iter().rev().copied().collect();
    check_chain(c, &pointing_down)?;
    let dv = dinf_out_view(c);
    let pos: BTreeMap<RayIndex, usize> = in_ray.iter().enumerate().map(|(k, r)| (*r, k)).collect();
    let comp = component_of(&dv, &pos.keys().copied().collect(), in_ray[0]);
    let dir = view_direction(c.orientation, Orientation::Out);
    let first = match degree_dichotomy(c, &comp, dir, Some(n as u64 - 1)) {
        Dichotomy::InfiniteDegreeVertex(j) => j,
        _ => return Err(Error::NoInfiniteOutDegree),
    };
    let fans: BTreeSet<RayIndex> = c.neighbours(first, dir);
    let t = out_view(host).truncate(depth);
    let mut d = Draft::new(t.clone());
    let mut order = vec![first];
    for m in 1..n as usize {
        let last_pos = pos[&order[m - 1]];
        let mut placed = false;
        let mut options: Vec<RayIndex> = fans
            .iter()
            .copied()
            .filter(|x| pos.get(x).is_some_and(|p| *p > last_pos))
            .collect();
        options.sort_by_key(|x| pos[x]);
        for x in options {
            if t.ray(x)?.vertices.iter().any(|v| d.closure.contains(v)) {
                continue;
            }
            let base = d.base();
            let Some(arch) = jump(&t, first, x, &base, &sigma_paths(c, first, x), None) else {
                continue;
            };
            let mut avoid = base.clone();
            avoid.extend(d.close(&arch));
            let seq: Vec<RayIndex> = (pos[&first]..=pos[&x]).rev().map(|p| in_ray[p]).collect();
            let Ok(stair) = climb(&t, &seq, &avoid, None, &|u, v| sigma_paths(c, u, v)) else {
                continue;
            };
            let Ok(step) = ray_walk(&t, arch.last(), stair.path().first()) else {
                continue;
            };
            let mut verts: BTreeSet<RayIndex> = order.iter().copied().collect();
            verts.insert(x);
            let parts = vec![
                GirderPart::Arch { path: arch },
                GirderPart::RayStep { path: step },
                GirderPart::Staircase {
                    staircase: regroup(&stair, &verts),
                },
            ];
            d.push(Girder {
                level: m as u32 + 1,
                parts,
            });
            order.push(x);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::obstruction(format!("girder {}", m + 1), depth));
        }
    }
    d.finish(GridKind::InwardDDQG, c.orientation, &order)
}

/// One round of the special out-ray: the ray edge `x y` on ray `ray` and the
/// staircase ending at `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutRayMarker {
    pub x: VertexId,
    pub y: VertexId,
    pub ray: RayIndex,
    /// Position of `ray` along the quotient out-ray.
    pub label: usize,
    /// Staircase through every out-ray position from the first marker's up
    /// to this one's; absent for the first marker.
    pub staircase: Option<Staircase>,
}

/// A path that keeps returning to the first ray and climbs to ever later rays
/// of a quotient out-ray, each climb clear of everything below it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialOutRay {
    pub path: PathSeq,
    pub markers: Vec<OutRayMarker>,
    pub depth: usize,
}

impl SpecialOutRay {
    /// The path as a spine over the marker rays, ready for contraction.
    pub fn as_spine(&self) -> Spine {
        let mut visits: BTreeMap<RayIndex, Vec<VertexId>> = BTreeMap::new();
        for m in &self.markers {
            visits.entry(m.ray).or_default().push(m.x);
        }
        Spine {
            orientation: Orientation::Out,
            path: self.path.clone(),
            visits,
            rounds: self.markers.iter().map(|m| m.ray).collect(),
            arrivals: self
                .markers
                .iter()
                .map(|m| self.path.position(m.x).expect("markers lie on the path"))
                .collect(),
            depth: self.depth,
        }
    }
}

/// Runs `rounds` rounds of the special out-ray construction over the quotient
/// out-ray `out_ray` (each entry enters the next).
pub fn build_special_out_ray(
    host: &RayedHost,
    c: &ContractionResult,
    out_ray: &[RayIndex],
    rounds: usize,
    depth: usize,
) -> Result<SpecialOutRay> {
    let (sh, stop) = special_out_ray_rounds(host, c, out_ray, rounds, depth)?;
    match stop {
        Some(e) => Err(e),
        None => Ok(sh),
    }
}

/// As many rounds as the truncation allows, up to `rounds`, with the reason
/// for stopping early.
fn special_out_ray_rounds(
    host: &RayedHost,
    c: &ContractionResult,
    out_ray: &[RayIndex],
    rounds: usize,
    depth: usize,
) -> Result<(SpecialOutRay, Option<Error>)> {
    if rounds == 0 || out_ray.is_empty() {
        return Err(Error::BadParameters(
            "need at least one round and one ray".into(),
        ));
    }
    check_chain(c, out_ray)?;
    let t = out_view(host).truncate(depth);
    let r1 = t.ray(out_ray[0])?;
    if r1.vertices.len() < 3 {
        return Err(Error::obstruction("first marker", depth));
    }
    let (x1, y1) = (r1.vertices[1], r1.vertices[2]);
    let mut path = r1.segment(&t.graph, 1, 2)?;
    let mut markers = vec![OutRayMarker {
        x: x1,
        y: y1,
        ray: out_ray[0],
        label: 0,
        staircase: None,
    }];
    for m in 1..rounds {
        match special_out_ray_round(&t, c, out_ray, &path, &markers, m) {
            Ok((p, marker)) => {
                path = p;
                markers.push(marker);
            }
            Err(e) => {
                return Ok((
                    SpecialOutRay {
                        path,
                        markers,
                        depth,
                    },
                    Some(e),
                ))
            }
        }
    }
    Ok((
        SpecialOutRay {
            path,
            markers,
            depth,
        },
        None,
    ))
}

fn special_out_ray_round(
    t: &Truncation,
    c: &ContractionResult,
    out_ray: &[RayIndex],
    path: &PathSeq,
    markers: &[OutRayMarker],
    m: usize,
) -> Result<(PathSeq, OutRayMarker)> {
    let depth = t.depth;
    let all = t.ray_indices();
    let r1 = t.ray(out_ray[0])?;
    let mut path = path.clone();
    {
        let stage = |what: &str| {
            Error::obstruction(format!("special out-ray round {}: {what}", m + 1), depth)
        };
        let last = markers.last().expect("nonempty").clone();
        let closed = down_closure(&path.vertex_set(), &all, t);
        // return path O to the first ray
        let o = if last.ray == out_ray[0] {
            let v = r1
                .vertices
                .iter()
                .find(|v| !closed.contains(v))
                .ok_or_else(|| stage("return"))?;
            PathSeq::single(*v)
        } else {
            let sources = t.ray_vertex_set(last.ray)?;
            let targets = t.ray_vertex_set(out_ray[0])?;
            crate::graph::shortest_path(
                &t.graph,
                &crate::graph::PathQuery::new(&sources, &targets, &closed),
            )
            .ok_or_else(|| stage("return"))?
        };
        // fresh ray, untouched so far
        let mut used = path.vertex_set();
        used.extend(o.vertices.iter().copied());
        let label = (last.label + 1..out_ray.len())
            .find(|&p| {
                t.ray(out_ray[p])
                    .is_ok_and(|r| r.vertices.iter().all(|v| !used.contains(v)))
            })
            .ok_or_else(|| stage("fresh ray"))?;
        let mut avoid = closed.clone();
        avoid.extend(down_closure(&o.vertex_set(), &all, t));
        let seq = &out_ray[..=label];
        let stair = climb(t, seq, &avoid, None, &|u, v| sigma_paths(c, u, v))
            .map_err(|_| stage("staircase"))?;
        // stitch: walk up the last ray to O, O, walk up the first ray, staircase
        path = path.concat(&ray_walk(t, path.last(), o.first())?)?;
        path = path.concat(&o)?;
        path = path.concat(&ray_walk(t, o.last(), stair.path().first())?)?;
        path = path.concat(&stair.path())?;
        let x = path.last();
        let ray = out_ray[label];
        let (_, px) = t.ray_position(x).expect("staircases end on rays");
        let y = *t
            .ray(ray)?
            .vertices
            .get(px + 1)
            .ok_or_else(|| stage("marker edge"))?;
        path = path.concat(&t.ray(ray)?.segment(&t.graph, px, px + 1)?)?;
        Ok((
            path,
            OutRayMarker {
                x,
                y,
                ray,
                label,
                staircase: Some(stair),
            },
        ))
    }
}

/// Checks the three marker properties directly: each staircase validates
/// and is a terminal piece of the stretch since the previous marker; the
/// path after `y_k` avoids the down-closure of the path up to `x_k`; and
/// `x_k` is the first path vertex on its ray.
pub fn verify_special_out_ray(sh: &SpecialOutRay, host: &RayedHost) -> crate::verdict::Verdict {
    use crate::verdict::{reject, RejectReason};
    let t = out_view(host).truncate(sh.depth);
    let all = t.ray_indices();
    let view = super::RayView::new(&t.rays);
    if let Err(m) = sh.path.check_in(&t.graph) {
        return reject(RejectReason::NotAPath, m);
    }
    let at = |v: VertexId| sh.path.position(v);
    for (k, m) in sh.markers.iter().enumerate() {
        let (Some(px), Some(py)) = (at(m.x), at(m.y)) else {
            return reject(
                RejectReason::NotAPath,
                format!("marker {k} is off the path"),
            );
        };
        if py != px + 1 || t.ray_position(m.x).map(|r| r.0) != Some(m.ray) {
            return reject(
                RejectReason::WrongEndpoints,
                format!("marker {k} is not an edge of its ray"),
            );
        }
        let first_on_ray = sh
            .path
            .vertices
            .iter()
            .position(|v| t.ray_position(*v).is_some_and(|r| r.0 == m.ray));
        if first_on_ray != Some(px) {
            return reject(
                RejectReason::WrongEndpoints,
                format!("marker {k} is not the first visit to its ray"),
            );
        }
        let below = down_closure(&sh.path.vertices[..=px].iter().copied().collect(), &all, &t);
        if sh.path.vertices[py..].iter().any(|v| below.contains(v)) {
            return reject(
                RejectReason::AvoidanceViolated,
                format!("path after marker {k} dips below it"),
            );
        }
        if k == 0 {
            continue;
        }
        let Some(stair) = &m.staircase else {
            return reject(
                RejectReason::NotAPath,
                format!("marker {k} lacks its staircase"),
            );
        };
        super::check_staircase(stair, &view, &t.graph)?;
        let sp = stair.path();
        let prev_y = at(sh.markers[k - 1].y).expect("checked above");
        let start = at(sp.first());
        let terminal =
            start.is_some_and(|s| s >= prev_y && sh.path.vertices[s..=px] == sp.vertices[..]);
        if !terminal {
            return reject(
                RejectReason::NotAPath,
                format!("staircase {k} is not a terminal piece before marker {k}"),
            );
        }
    }
    Ok(())
}

/// Outward dominated grid from an out-ray of the quotient, via the special
/// out-ray and a re-contraction along it.
///
/// The first vertical is a marker ray of unbounded in-degree in the
/// re-contraction (at least `n - 1` observed in-neighbours). Each girder is a
/// marker staircase trimmed to start there, a step up the new vertical, and
/// a segment of the special out-ray back down to the first vertical.
pub fn grid_from_out_ray(
    host: &RayedHost,
    c: &ContractionResult,
    out_ray: &[RayIndex],
    n: u32,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    if n < 2 {
        return Err(Error::BadParameters("a grid needs two levels".into()));
    }
    let rounds = out_ray.len().min(4 * n as usize + 4);
    let (sh, _) = special_out_ray_rounds(host, c, out_ray, rounds, depth)?;
    if sh.markers.len() < n as usize {
        return Err(Error::obstruction("special out-ray", depth));
    }
    let hv = out_view(host);
    let a_set: BTreeSet<RayIndex> = sh.markers.iter().map(|m| m.ray).collect();
    let chain = sh
        .markers
        .windows(2)
        .map(|w| PairPattern::Pair {
            from: w[0].ray,
            to: w[1].ray,
        })
        .collect();
    let cert = Certification::exact(chain);
    let c2 = contract_with(&hv, &sh.as_spine(), &a_set, &cert, None)?;
    let comp = component_of(&c2.dinf.graph, &a_set, sh.markers[0].ray);
    let first = match degree_dichotomy(&c2, &comp, Orientation::In, Some(n as u64 - 1)) {
        Dichotomy::InfiniteDegreeVertex(j) => j,
        _ => return Err(Error::NoInfiniteInDegree),
    };
    let fans = c2.neighbours(first, Orientation::In);
    let index_of = |r: RayIndex| {
        sh.markers
            .iter()
            .position(|m| m.ray == r)
            .expect("marker ray")
    };
    let t = hv.truncate(depth);
    let mut d = Draft::new(t.clone());
    let mut order = vec![first];
    for m in 1..n as usize {
        let after = index_of(order[m - 1]);
        let mut placed = false;
        for k in after + 1..sh.markers.len() {
            let marker = &sh.markers[k];
            let x = marker.ray;
            if !fans.contains(&x) || t.ray(x)?.vertices.iter().any(|v| d.closure.contains(v)) {
                continue;
            }
            let stair = marker
                .staircase
                .as_ref()
                .expect("later markers carry staircases");
            let Some(i) = stair.sequence.iter().position(|r| *r == first) else {
                continue;
            };
            let sub = Staircase {
                sequence: stair.sequence[i..].to_vec(),
                segments: stair.segments[2 * i..].to_vec(),
                simple: stair.simple,
            };
            let base = d.base();
            if sub.path().vertices.iter().any(|v| base.contains(v)) {
                continue;
            }
            let mut verts: BTreeSet<RayIndex> = order.iter().copied().collect();
            verts.insert(x);
            let mut avoid = base.clone();
            avoid.extend(d.close(&sub.path()));
            let Some(back) = jump(
                &t,
                x,
                first,
                &avoid,
                &sigma_paths(&c2, x, first),
                Some(&verts),
            ) else {
                continue;
            };
            let Ok(step) = ray_walk(&t, sub.path().last(), back.first()) else {
                continue;
            };
            let parts = vec![
                GirderPart::Staircase {
                    staircase: regroup(&sub, &verts),
                },
                GirderPart::RayStep { path: step },
                GirderPart::Arch { path: back },
            ];
            d.push(Girder {
                level: m as u32 + 1,
                parts,
            });
            order.push(x);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::obstruction(format!("girder {}", m + 1), depth));
        }
    }
    d.finish(GridKind::OutwardDDQG, c.orientation, &order)
}
