use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::spines::spine_of;
use super::structure::{analyze_in_with, analyze_out_with};
use super::{
    analyze_out_structure, find_avoiding_subfamily, longest_spine, pair_schedule,
    strongly_connecting_spine, Branch, PathFamily, StructureVerdict,
};
use crate::catalog::finite_host;
use crate::contraction::{contract, contract_with, ContractionResult};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, VertexId};
use crate::grids::{
    find_bounded_minor, grid_from_in_ray, grid_from_out_ray, grid_from_strong_component,
    GridCertificate, ModelSearch, Shape,
};
use crate::rays::{Certification, Orientation, PairPattern, RayIndex, RayPrefix, RayedHost, Spine};

/// One pipeline stage: digests of what went in and came out, and the output itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub stage: String,
    pub inputs: String,
    pub outputs: String,
    pub artifact: serde_json::Value,
}

/// Which construction produced the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    StrongComponent,
    InRay,
    OutRay,
    /// A component or ray found after restricting to the spine avoiding the
    /// initial pieces; `inner` says which.
    Restricted {
        inner: RestrictedRoute,
    },
    /// Two opposite path families joined by a spine whose quotient is strongly connected.
    ConnectingSpine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictedRoute {
    StrongComponent,
    InRay,
    OutRay,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub route: Route,
    pub graph: MultiDigraph,
    pub certificate: GridCertificate,
    pub audit: Vec<AuditEntry>,
}

fn digest<T: Serialize>(v: &T) -> String {
    let json = serde_json::to_vec(v).expect("audit values serialize");
    let h = Sha256::digest(&json);
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Default)]
struct Audit(Vec<AuditEntry>);

impl Audit {
    fn record<I: Serialize, O: Serialize>(&mut self, stage: &str, inputs: &I, outputs: &O) {
        self.0.push(AuditEntry {
            stage: stage.to_string(),
            inputs: digest(inputs),
            outputs: digest(outputs),
            artifact: serde_json::to_value(outputs).expect("audit values serialize"),
        });
    }
}

/// Shapes tried, in order, when a strong component must yield a model.
fn shapes(n: u32) -> [Shape; 4] {
    [
        Shape::BidirectedPath { len: n },
        Shape::DominatedDirectedPath {
            len: n,
            orientation: Orientation::Out,
        },
        Shape::DominatedDirectedPath {
            len: n,
            orientation: Orientation::In,
        },
        Shape::BidirectedStar { leaves: n },
    ]
}

fn grid_from_component(
    host: &RayedHost,
    c: &ContractionResult,
    component: &[RayIndex],
    n: u32,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    let keep: BTreeSet<VertexId> = component.iter().map(|r| r.vertex()).collect();
    let g = c.dinf.graph.induced(&keep);
    for bound in 1..=2 {
        for shape in shapes(n) {
            if let ModelSearch::Found(m) = find_bounded_minor(&g, shape, bound) {
                if let Ok(out) = grid_from_strong_component(host, c, &m, n, depth) {
                    return Ok(out);
                }
            }
        }
    }
    Err(Error::InsufficientModel(n as usize))
}

/// Dispatches a component or ray verdict to its grid builder.
fn grid_from_branch(
    host: &RayedHost,
    spine: &Spine,
    branch: &Branch,
    n: u32,
    depth: usize,
    threshold: Option<u64>,
) -> Result<(RestrictedRoute, MultiDigraph, GridCertificate)> {
    let all = host.truncate(depth).ray_indices();
    let c = contract(host, spine, &all, threshold)?;
    match branch {
        Branch::InfiniteStrongComponent { component } => {
            let (g, cert) = grid_from_component(host, &c, component, n, depth)?;
            Ok((RestrictedRoute::StrongComponent, g, cert))
        }
        Branch::DirectedRayInDinf {
            orientation: Orientation::In,
            rays,
        } => {
            let (g, cert) = grid_from_in_ray(host, &c, rays, n, depth)?;
            Ok((RestrictedRoute::InRay, g, cert))
        }
        Branch::DirectedRayInDinf {
            orientation: Orientation::Out,
            rays,
        } => {
            let (g, cert) = grid_from_out_ray(host, &c, rays, n, depth)?;
            Ok((RestrictedRoute::OutRay, g, cert))
        }
        Branch::PathFamily { .. } => Err(Error::InvalidInput(
            "path families have no direct grid".into(),
        )),
    }
}

/// The first vertex of each ray above every family path arriving on it.
fn cut_vertices(
    host: &RayedHost,
    family: &PathFamily,
    depth: usize,
) -> Result<BTreeMap<RayIndex, VertexId>> {
    let t = host.truncate(depth);
    let mut cuts = BTreeMap::new();
    for &i in &family.indices {
        let ray = t.ray(i)?;
        let arrivals = family
            .paths
            .iter()
            .filter(|p| p.to == i)
            .filter_map(|p| ray.position(p.path.last()));
        let p = arrivals.max().map_or(0, |p| p + 1);
        let v = *ray
            .vertices
            .get(p)
            .ok_or_else(|| Error::obstruction(format!("cut vertex on ray {i}"), depth))?;
        cuts.insert(i, v);
    }
    Ok(cuts)
}

/// The spine together with the tails of its rays from their cut vertices,
/// as a host of its own.
fn restrict_to_spine(
    host: &RayedHost,
    spine_path: &crate::graph::PathSeq,
    indices: &[RayIndex],
    cuts: &BTreeMap<RayIndex, VertexId>,
    depth: usize,
) -> Result<RayedHost> {
    let t = host.truncate(depth);
    let mut g = MultiDigraph::new();
    let mut rays = BTreeMap::new();
    let add = |g: &mut MultiDigraph, p: &crate::graph::PathSeq| -> Result<()> {
        for v in &p.vertices {
            g.add_vertex(*v);
        }
        for e in &p.edges {
            if g.edge(*e).is_none() {
                let edge = t
                    .graph
                    .edge(*e)
                    .ok_or_else(|| Error::InvalidInput("edge outside the host".into()))?;
                g.add_edge_with_id(edge.id, edge.tail, edge.head, edge.multiplicity)?;
            }
        }
        Ok(())
    };
    add(&mut g, spine_path)?;
    for i in indices {
        let tail = t.ray(*i)?.tail(cuts[i])?;
        let p = tail.segment(&t.graph, 0, tail.len() - 1)?;
        add(&mut g, &p)?;
        rays.insert(*i, tail);
    }
    Ok(finite_host(
        "restricted",
        g,
        rays,
        host.orientation,
        Certification::default(),
    ))
}

/// Extends each vertical back to its ray's root and recomputes the subgraph.
fn with_initial_pieces(
    host: &RayedHost,
    mut cert: GridCertificate,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    let t = host.truncate(depth);
    for r in cert.verticals.values_mut() {
        let full = t.ray(r.index)?;
        let end = full
            .position(r.tip())
            .ok_or(Error::VertexNotOnRay(r.tip()))?;
        *r = RayPrefix {
            vertices: full.vertices[..=end].to_vec(),
            ..full.clone()
        };
    }
    let g = cert.subgraph(&t.graph);
    Ok((g, cert))
}

fn direct_route(r: RestrictedRoute) -> Route {
    match r {
        RestrictedRoute::StrongComponent => Route::StrongComponent,
        RestrictedRoute::InRay => Route::InRay,
        RestrictedRoute::OutRay => Route::OutRay,
    }
}

/// From a family of equivalent rays to a grid of `n` levels whose verticals
/// are pieces of family rays, keeping every intermediate result.
///
/// In-ray families are handled in the reversed host. The path-family route
/// needs enough rays for a window of `n` plus one reserve ray per passage of
/// the connecting spine.
pub fn main_pipeline(
    host: &RayedHost,
    n: u32,
    depth: usize,
    threshold: Option<u64>,
) -> Result<PipelineRun> {
    if n < 2 {
        return Err(Error::BadParameters("a grid needs two levels".into()));
    }
    if host.orientation == Orientation::In {
        let mut run = main_pipeline(&host.reversed(), n, depth, threshold)?;
        run.certificate.orientation = run.certificate.orientation.flip();
        run.graph = run.graph.reverse();
        return Ok(run);
    }
    let mut audit = Audit::default();
    let window_len = n as usize;
    let passages = pair_schedule(&(1..=n).map(RayIndex).collect::<Vec<_>>(), 1).len() - 1;
    let need = window_len + passages;
    let first = analyze_out_structure(host, depth, threshold, window_len)?;
    audit.record("out-structure", &(depth, threshold, window_len), &first);
    let forward = match first.branch {
        // a family large enough for the connecting spine if the truncation
        // has one, else the small one, which can still finish in the
        // restricted host
        Branch::PathFamily { .. } => match analyze_out_structure(host, depth, threshold, need) {
            Ok(v) => {
                audit.record("out-structure (family size)", &(depth, threshold, need), &v);
                v
            }
            Err(_) => first,
        },
        _ => first,
    };
    let forward = match forward.branch {
        Branch::PathFamily { family } => family,
        b => return finish_direct(host, &b, n, depth, threshold, audit),
    };
    // the connecting spine needs the large family; a small one can still
    // finish in the restricted host
    let mut failure = Error::InsufficientModel(window_len);
    for size in [need, window_len] {
        if forward.indices.len() < size {
            continue;
        }
        let keep: BTreeSet<RayIndex> = forward.indices[..size].iter().copied().collect();
        match from_family(
            host,
            &forward.restrict(&keep),
            n,
            need,
            depth,
            threshold,
            audit.clone(),
        ) {
            Ok(run) => return Ok(run),
            Err(e) => failure = e,
        }
    }
    Err(failure)
}

/// Cut vertices, the avoiding spine, the restricted host and, when it yields
/// another family, the connecting spine.
fn from_family(
    host: &RayedHost,
    forward: &PathFamily,
    n: u32,
    need: usize,
    depth: usize,
    threshold: Option<u64>,
    mut audit: Audit,
) -> Result<PipelineRun> {
    let window_len = n as usize;
    let cuts = cut_vertices(host, forward, depth)?;
    audit.record("cut vertices", &forward.indices, &cuts);
    let avoiding = find_avoiding_subfamily(host, &cuts, forward.indices.len(), depth)?;
    audit.record("avoiding spine", &cuts, &avoiding);
    let mut order = avoiding.indices.clone();
    order.sort();
    let restricted = restrict_to_spine(host, &avoiding.spine.path, &order, &cuts, depth)?;
    let local = threshold.or(Some(2));
    let size = if order.len() >= need {
        need
    } else {
        window_len
    };
    // the restricted host is analysed along the avoiding spine itself
    let reversed_spine = spine_of(
        &restricted.truncate(depth),
        avoiding.spine.path.clone(),
        Orientation::In,
        depth,
    );
    let inner: StructureVerdict =
        analyze_in_with(&restricted, &reversed_spine, depth, local, size)?;
    audit.record(
        "in-structure (restricted)",
        &(order.clone(), local, size),
        &inner,
    );
    let backward = match inner.branch {
        Branch::PathFamily { family } => family,
        b => {
            let (r, _, cert) = grid_from_branch(&restricted, &avoiding.spine, &b, n, depth, local)?;
            let (graph, certificate) = with_initial_pieces(host, cert, depth)?;
            audit.record("grid", &b, &certificate);
            return Ok(PipelineRun {
                route: Route::Restricted { inner: r },
                graph,
                certificate,
                audit: audit.0,
            });
        }
    };
    if backward.indices.len() < need {
        return Err(Error::ReserveExhausted);
    }
    let (window, reserve) = backward.indices.split_at(window_len);
    let spine = strongly_connecting_spine(host, forward, &backward, window, reserve, 1, depth)?;
    audit.record("connecting spine", &(window, reserve), &spine);
    let schedule = pair_schedule(window, 1);
    let cert = Certification::exact(
        schedule
            .windows(2)
            .map(|w| PairPattern::Pair {
                from: w[0],
                to: w[1],
            })
            .collect(),
    );
    let window_set: BTreeSet<RayIndex> = window.iter().copied().collect();
    let c = contract_with(host, &spine, &window_set, &cert, None)?;
    let (graph, certificate) = grid_from_component(host, &c, window, n, depth)?;
    audit.record("grid", &window, &certificate);
    Ok(PipelineRun {
        route: Route::ConnectingSpine,
        graph,
        certificate,
        audit: audit.0,
    })
}

fn finish_direct(
    host: &RayedHost,
    branch: &Branch,
    n: u32,
    depth: usize,
    threshold: Option<u64>,
    mut audit: Audit,
) -> Result<PipelineRun> {
    let spine = longest_spine(host, depth)?;
    let (r, graph, certificate) = grid_from_branch(host, &spine, branch, n, depth, threshold)?;
    audit.record("grid", branch, &certificate);
    Ok(PipelineRun {
        route: direct_route(r),
        graph,
        certificate,
        audit: audit.0,
    })
}

/// The direct routes of the pipeline along a spine the caller already has,
/// for hosts whose construction provides one. A path-family verdict is
/// reported as `Undetermined`.
pub fn pipeline_along(
    host: &RayedHost,
    spine: &Spine,
    n: u32,
    depth: usize,
    threshold: Option<u64>,
) -> Result<PipelineRun> {
    if n < 2 {
        return Err(Error::BadParameters("a grid needs two levels".into()));
    }
    let mut audit = Audit::default();
    let v = analyze_out_with(host, spine, depth, threshold, n as usize)?;
    audit.record("out-structure (given spine)", &(depth, threshold, n), &v);
    if let Branch::PathFamily { .. } = v.branch {
        return Err(Error::Undetermined(
            "the spine only certifies a path family".into(),
        ));
    }
    let (r, graph, certificate) = grid_from_branch(host, spine, &v.branch, n, depth, threshold)?;
    audit.record("grid", &v.branch, &certificate);
    Ok(PipelineRun {
        route: direct_route(r),
        graph,
        certificate,
        audit: audit.0,
    })
}
