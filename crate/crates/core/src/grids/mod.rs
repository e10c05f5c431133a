//! Staircases, quarter-grid certificates and their recognizers, tree-like
//! models, and the grid builders.

mod build;
mod model;
mod natural;
mod staircase;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::graph::{MultiDigraph, PathSeq, VertexId};
use crate::layout::GridKind;
use crate::rays::{Orientation, RayIndex, RayPrefix, RayedHost};
use crate::verdict::{reject, Reject, RejectReason, Verdict};

pub use build::{
    build_special_out_ray, grid_from_in_ray, grid_from_out_ray, grid_from_strong_component,
    verify_special_out_ray, OutRayMarker, SpecialOutRay,
};
pub use model::{
    find_bounded_minor, validate_tree_like_model, ModelSearch, Shape, TreeLikeModel, VertexImage,
};
pub use natural::natural_certificate;
pub use staircase::build_staircase;
pub(crate) use staircase::jump;

/// A path climbing through rays `sequence[0], sequence[1], ...`.
///
/// `segments` alternates jumps between rays and walks along a ray:
/// `P_1, Q_2, P_2, ..., Q_{n-1}, P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Staircase {
    pub sequence: Vec<RayIndex>,
    pub segments: Vec<PathSeq>,
    pub simple: bool,
}

impl Staircase {
    /// The staircase as a single path.
    pub fn path(&self) -> PathSeq {
        let mut p = self.segments[0].clone();
        for s in &self.segments[1..] {
            p.vertices.extend_from_slice(&s.vertices[1..]);
            p.edges.extend_from_slice(&s.edges);
        }
        p
    }

    /// The jumps `P_j` between rays.
    pub fn jumps(&self) -> impl Iterator<Item = &PathSeq> {
        self.segments.iter().step_by(2)
    }
}

/// Positions of vertices on a set of out-ray prefixes.
#[derive(Clone, Debug)]
pub struct RayView<'a> {
    pub rays: &'a BTreeMap<RayIndex, RayPrefix>,
    positions: HashMap<VertexId, (RayIndex, usize)>,
}

impl<'a> RayView<'a> {
    pub fn new(rays: &'a BTreeMap<RayIndex, RayPrefix>) -> Self {
        let mut positions = HashMap::new();
        for r in rays.values() {
            for (p, v) in r.vertices.iter().enumerate() {
                positions.insert(*v, (r.index, p));
            }
        }
        RayView { rays, positions }
    }

    pub fn position(&self, v: VertexId) -> Option<(RayIndex, usize)> {
        self.positions.get(&v).copied()
    }

    /// `x` plus every ray vertex at or before a vertex of `x`.
    pub fn down_closure(&self, x: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut out = x.clone();
        let mut reach: BTreeMap<RayIndex, usize> = BTreeMap::new();
        for v in x {
            if let Some((r, p)) = self.position(*v) {
                let e = reach.entry(r).or_insert(0);
                *e = (*e).max(p);
            }
        }
        for (r, p) in reach {
            out.extend(self.rays[&r].vertices[..=p].iter().copied());
        }
        out
    }
}

/// Checks the two staircase clauses, simplicity, and that the whole is a path
/// of `g`, against the given out-ray prefixes.
pub fn check_staircase(s: &Staircase, view: &RayView<'_>, g: &MultiDigraph) -> Verdict {
    let n = s.sequence.len();
    if n < 2 || s.segments.len() != 2 * n - 3 {
        return reject(
            RejectReason::NotAPath,
            format!("{} rays but {} segments", n, s.segments.len()),
        );
    }
    for (k, seg) in s.segments.iter().enumerate() {
        if let Err(m) = seg.check_in(g) {
            return reject(RejectReason::NotAPath, format!("segment {k}: {m}"));
        }
        if k > 0 && s.segments[k - 1].last() != seg.first() {
            return reject(
                RejectReason::NotAPath,
                format!("segment {k} does not continue segment {}", k - 1),
            );
        }
        if s.simple && seg.len() != 1 {
            return reject(
                RejectReason::NotSimple,
                format!("segment {k} has {} edges", seg.len()),
            );
        }
    }
    for (j, p) in s.segments.iter().step_by(2).enumerate() {
        let (a, b) = (s.sequence[j], s.sequence[j + 1]);
        let on = |v: VertexId| view.position(v).map(|x| x.0);
        if on(p.first()) != Some(a) || on(p.last()) != Some(b) {
            return reject(
                RejectReason::WrongEndpoints,
                format!("jump {} should run from ray {a} to ray {b}", j + 1),
            );
        }
        if let Some(w) = p.interior().iter().find(|w| view.position(**w).is_some()) {
            return reject(
                RejectReason::InternalRayContact,
                format!("jump {} meets a ray at {w}", j + 1),
            );
        }
    }
    for (j, q) in s.segments.iter().skip(1).step_by(2).enumerate() {
        let ray = s.sequence[j + 1];
        if q.is_empty() {
            return reject(
                RejectReason::NontrivialityViolated,
                format!("walk on ray {ray} is trivial"),
            );
        }
        let along =
            q.vertices
                .windows(2)
                .all(|w| match (view.position(w[0]), view.position(w[1])) {
                    (Some((r0, p0)), Some((r1, p1))) => r0 == ray && r1 == ray && p1 == p0 + 1,
                    _ => false,
                });
        if !along {
            return reject(
                RejectReason::NotAPath,
                format!("walk {} leaves ray {ray}", j + 2),
            );
        }
    }
    if !s.path().is_simple() {
        return reject(RejectReason::NotAPath, "staircase repeats a vertex");
    }
    Ok(())
}

/// Validates a staircase against the family rays of `host` at `depth`.
/// For in-ray families the staircase is read in the reversed host.
pub fn validate_staircase(s: &Staircase, host: &RayedHost, depth: usize) -> Verdict {
    let host = out_view(host);
    let t = host.truncate(depth);
    check_staircase(s, &RayView::new(&t.rays), &t.graph)
}

/// The host itself for out-ray families, its reversal for in-ray families.
pub fn out_view(host: &RayedHost) -> RayedHost {
    match host.orientation {
        Orientation::Out => host.clone(),
        Orientation::In => host.reversed(),
    }
}

/// One piece of a girder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "part")]
pub enum GirderPart {
    Staircase {
        staircase: Staircase,
    },
    /// A nontrivial walk up the girder's own vertical.
    RayStep {
        path: PathSeq,
    },
    /// A (subdivided) edge between the first vertical and the girder's own.
    Arch {
        path: PathSeq,
    },
}

impl GirderPart {
    pub fn path(&self) -> PathSeq {
        match self {
            GirderPart::Staircase { staircase } => staircase.path(),
            GirderPart::RayStep { path } | GirderPart::Arch { path } => path.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Girder {
    /// The girder reaches verticals `1..=level`.
    pub level: u32,
    pub parts: Vec<GirderPart>,
}

impl Girder {
    pub fn path(&self) -> PathSeq {
        let mut p = self.parts[0].path();
        for part in &self.parts[1..] {
            let q = part.path();
            p.vertices.extend_from_slice(&q.vertices[1..]);
            p.edges.extend_from_slice(&q.edges);
        }
        p
    }

    /// Branch points: first and last vertex of every staircase segment and part.
    fn branch_vertices(&self) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for part in &self.parts {
            match part {
                GirderPart::Staircase { staircase } => {
                    for s in &staircase.segments {
                        out.insert(s.first());
                        out.insert(s.last());
                    }
                }
                GirderPart::RayStep { path } | GirderPart::Arch { path } => {
                    out.insert(path.first());
                    out.insert(path.last());
                }
            }
        }
        out
    }
}

/// A subdivided quarter-grid prefix: vertical rays by level and girders
/// `2..=levels`.
///
/// When `orientation` is `In`, every path is read in the reversed host, so
/// that the verticals are out-rays there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub kind: GridKind,
    pub orientation: Orientation,
    /// Level to vertical prefix; `RayPrefix::index` names the family ray.
    pub verticals: BTreeMap<u32, RayPrefix>,
    pub girders: Vec<Girder>,
    pub depth: usize,
}

impl GridCertificate {
    pub fn levels(&self) -> u32 {
        self.verticals.len() as u32
    }

    pub fn vertical_index(&self, level: u32) -> Option<RayIndex> {
        self.verticals.get(&level).map(|r| r.index)
    }

    /// The union of verticals and girders, as a subgraph of `g`.
    pub fn subgraph(&self, g: &MultiDigraph) -> MultiDigraph {
        let mut out = MultiDigraph::new();
        let mut add = |p: &PathSeq| {
            for v in &p.vertices {
                out.add_vertex(*v);
            }
            for e in &p.edges {
                if out.edge(*e).is_none() {
                    let edge = g.edge(*e).expect("certificate edges come from the host");
                    out.add_edge_with_id(edge.id, edge.tail, edge.head, edge.multiplicity)
                        .expect("endpoints added");
                }
            }
        };
        for r in self.verticals.values() {
            let p = PathSeq::from_vertices(g, r.vertices.clone()).unwrap_or_else(|_| PathSeq {
                vertices: r.vertices.clone(),
                edges: Vec::new(),
            });
            add(&p);
        }
        for gd in &self.girders {
            for part in &gd.parts {
                add(&part.path());
            }
        }
        out
    }

    /// Vertices of all girders.
    pub fn girder_vertices(&self) -> BTreeSet<VertexId> {
        self.girders
            .iter()
            .flat_map(|g| g.path().vertices)
            .collect()
    }
}

/// Validates a grid certificate against the subgraph `g` of the host's
/// truncation at `depth`.
pub fn validate_grid(
    g: &MultiDigraph,
    cert: &GridCertificate,
    host: &RayedHost,
    depth: usize,
) -> Verdict {
    let (host, g) = match cert.orientation {
        Orientation::Out => (host.clone(), g.clone()),
        Orientation::In => (host.reversed(), g.reverse()),
    };
    if host.orientation != Orientation::Out {
        return reject(
            RejectReason::VerticalNotFamilyRay,
            "certificate orientation disagrees with the family",
        );
    }
    let t = host.truncate(depth);
    if !g.is_subgraph_of(&t.graph) {
        return reject(
            RejectReason::NotInHost,
            "subgraph is not contained in the truncation",
        );
    }
    check_verticals(cert, &t.rays, &g)?;
    let mut verticals = BTreeMap::new();
    for r in cert.verticals.values() {
        verticals.insert(r.index, r.clone());
    }
    let view = RayView::new(&verticals);
    let levels = cert.levels();
    let got: Vec<u32> = cert.girders.iter().map(|gd| gd.level).collect();
    let want: Vec<u32> = (2..=levels).collect();
    if got != want {
        return reject(
            RejectReason::GirderShape,
            format!("girder levels {got:?}, expected {want:?}"),
        );
    }
    for gd in &cert.girders {
        check_girder(gd, cert, &view, &g)?;
    }
    let closures: Vec<BTreeSet<VertexId>> = cert
        .girders
        .iter()
        .map(|gd| view.down_closure(&gd.path().vertex_set()))
        .collect();
    for (k, gd) in cert.girders.iter().enumerate() {
        let vs = gd.path().vertex_set();
        if let Some(i) = (0..k).find(|&i| !vs.is_disjoint(&closures[i])) {
            return reject(
                RejectReason::AvoidanceViolated,
                format!(
                    "girder {} meets the down-closure of girder {}",
                    gd.level, cert.girders[i].level
                ),
            );
        }
    }
    let girder_vs = cert.girder_vertices();
    if let Some((l, r)) = cert
        .verticals
        .iter()
        .find(|(_, r)| girder_vs.contains(&r.root()))
    {
        return reject(
            RejectReason::RootTouched,
            format!("root {} of vertical {l} lies on a girder", r.root()),
        );
    }
    let union = cert.subgraph(&g);
    let dense = union.dense();
    for gd in &cert.girders {
        for v in gd.branch_vertices() {
            let i = dense.index_of(v).expect("branch vertex in union");
            if dense.out(i).len() == 1 && dense.inc(i).len() == 1 {
                return reject(
                    RejectReason::DegreeTwoVertex,
                    format!("branch vertex {v} of girder {}", gd.level),
                );
            }
        }
    }
    Ok(())
}

fn check_verticals(
    cert: &GridCertificate,
    family: &BTreeMap<RayIndex, RayPrefix>,
    g: &MultiDigraph,
) -> Verdict {
    let levels = cert.levels();
    if levels < 2 || cert.verticals.keys().copied().ne(1..=levels) {
        return reject(
            RejectReason::VerticalNotFamilyRay,
            "verticals must be levels 1..=n with n >= 2",
        );
    }
    let mut seen = BTreeSet::new();
    for (l, r) in &cert.verticals {
        let Some(fam) = family.get(&r.index) else {
            return reject(
                RejectReason::VerticalNotFamilyRay,
                format!("vertical {l} names unknown ray {}", r.index),
            );
        };
        let ok = r.orientation == Orientation::Out
            && !r.vertices.is_empty()
            && fam
                .position(r.root())
                .is_some_and(|p| fam.vertices[p..].starts_with(&r.vertices));
        if !ok {
            return reject(
                RejectReason::VerticalNotFamilyRay,
                format!("vertical {l} is not a piece of ray {}", r.index),
            );
        }
        if let Err(m) = r.check_in(g) {
            return reject(RejectReason::GirderBroken, format!("vertical {l}: {m}"));
        }
        for v in &r.vertices {
            if !seen.insert(*v) {
                return reject(
                    RejectReason::VerticalsIntersect,
                    format!("vertex {v} on two verticals"),
                );
            }
        }
    }
    Ok(())
}

fn check_girder(
    gd: &Girder,
    cert: &GridCertificate,
    view: &RayView<'_>,
    g: &MultiDigraph,
) -> Verdict {
    let n = gd.level;
    let ray_of = |l: u32| cert.vertical_index(l).expect("levels checked");
    let (first, own) = (ray_of(1), ray_of(n));
    let on = |v: VertexId| view.position(v).map(|x| x.0);
    let detail = |m: &str| format!("girder {n}: {m}");
    for part in &gd.parts {
        if let Err(m) = part.path().check_in(g) {
            return reject(RejectReason::GirderBroken, detail(&m));
        }
    }
    // arches first: a reversed arch is the signature of the other orientation
    for part in &gd.parts {
        if let GirderPart::Arch { path } = part {
            let (a, b) = (on(path.first()), on(path.last()));
            let expected = match cert.kind {
                GridKind::OutwardDDQG => (Some(own), Some(first)),
                GridKind::InwardDDQG => (Some(first), Some(own)),
                GridKind::BidirectedQG => {
                    return reject(
                        RejectReason::ArchOrientation,
                        detail("bidirected girders have no arch"),
                    );
                }
            };
            if (a, b) == (expected.1, expected.0) {
                return reject(
                    RejectReason::ArchOrientation,
                    detail("arch runs the wrong way"),
                );
            }
            if (a, b) != expected {
                return reject(
                    RejectReason::GirderShape,
                    detail("arch does not join the first and own vertical"),
                );
            }
            if path.interior().iter().any(|w| view.position(*w).is_some()) {
                return reject(
                    RejectReason::InternalRayContact,
                    detail("arch meets a vertical internally"),
                );
            }
        }
    }
    let up: Vec<RayIndex> = (1..=n).map(ray_of).collect();
    let down: Vec<RayIndex> = up.iter().rev().copied().collect();
    let shape_ok = match (cert.kind, gd.parts.as_slice()) {
        (
            GridKind::BidirectedQG,
            [GirderPart::Staircase { staircase: a }, GirderPart::RayStep { .. }, GirderPart::Staircase { staircase: b }],
        ) => a.sequence == up && b.sequence == down,
        (
            GridKind::OutwardDDQG,
            [GirderPart::Staircase { staircase: a }, GirderPart::RayStep { .. }, GirderPart::Arch { .. }],
        ) => a.sequence == up,
        (
            GridKind::InwardDDQG,
            [GirderPart::Arch { .. }, GirderPart::RayStep { .. }, GirderPart::Staircase { staircase: b }],
        ) => b.sequence == down,
        _ => false,
    };
    if !shape_ok {
        return reject(
            RejectReason::GirderShape,
            detail("parts do not match the grid kind"),
        );
    }
    for part in &gd.parts {
        match part {
            GirderPart::Staircase { staircase } => {
                if let Err(r) = check_staircase(staircase, view, g) {
                    return Err(Reject {
                        detail: detail(&r.detail),
                        ..r
                    });
                }
            }
            GirderPart::RayStep { path } => {
                let along = !path.is_empty()
                    && path.vertices.windows(2).all(|w| {
                        match (view.position(w[0]), view.position(w[1])) {
                            (Some((r0, p0)), Some((r1, p1))) => {
                                r0 == own && r1 == own && p1 == p0 + 1
                            }
                            _ => false,
                        }
                    });
                if !along {
                    return reject(
                        RejectReason::GirderShape,
                        detail("ray step is not a walk up its vertical"),
                    );
                }
            }
            GirderPart::Arch { .. } => {}
        }
    }
    for w in gd.parts.windows(2) {
        if w[0].path().last() != w[1].path().first() {
            return reject(RejectReason::GirderBroken, detail("parts do not join"));
        }
    }
    if !gd.path().is_simple() {
        return reject(RejectReason::GirderShape, detail("girder repeats a vertex"));
    }
    // the second piece must avoid the down-closure of the first
    let (early, late) = match gd.parts.as_slice() {
        [a, _, c] => (a.path(), c.path()),
        _ => unreachable!("shape checked"),
    };
    if !late
        .vertex_set()
        .is_disjoint(&view.down_closure(&early.vertex_set()))
    {
        return reject(
            RejectReason::AvoidanceViolated,
            detail("closing piece dips below the opening piece"),
        );
    }
    Ok(())
}
