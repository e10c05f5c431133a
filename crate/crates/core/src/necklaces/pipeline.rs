use std::collections::{BTreeMap, BTreeSet};

use super::{
    build_transversal_paths, necklace_to_ray_minor, parity_log, rewitness, Necklace,
    NecklaceGirder, NecklaceGridCertificate, NecklaceKind, StrongMinorMap, Transversal,
};
use crate::analysis::{join, pipeline_along, ray_walk, spine_of, PipelineRun};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, PathSeq};
use crate::grids::{GirderPart, GridCertificate};
use crate::rays::{Orientation, RayedHost, Spine};

#[derive(Clone, Debug)]
pub struct NecklaceRun {
    pub transversal: Transversal,
    pub minor: StrongMinorMap,
    /// The grid found in the minor.
    pub inner: PipelineRun,
    pub certificate: NecklaceGridCertificate,
    /// The certificate's subgraph of the host truncation.
    pub graph: MultiDigraph,
}

/// Transversal rounds used by `necklace_pipeline`: every ordered pair of
/// necklaces, `passes` times.
pub fn transversal_rounds(necklaces: usize, passes: usize) -> usize {
    necklaces * necklaces.saturating_sub(1) * passes
}

/// The trails chained into one spine of the minor: each trail starts on the
/// ray where the previous one ended, above it.
fn trail_spine(minor: &StrongMinorMap, tr: &Transversal, depth: usize) -> Result<Spine> {
    let t = minor.host.truncate(depth);
    let first = tr
        .paths
        .first()
        .ok_or_else(|| Error::BadParameters("no transversal paths".into()))?;
    let root = t.ray(first.from)?.root();
    let mut spine = crate::graph::PathSeq::single(root);
    for trail in &minor.trails {
        let walk = ray_walk(&t, spine.last(), trail.first()).ok_or_else(|| {
            Error::obstruction(
                format!("walk from {} to {}", spine.last(), trail.first()),
                depth,
            )
        })?;
        spine = join(&[&spine, &walk, trail])?;
    }
    Ok(spine_of(&t, spine, Orientation::Out, depth))
}

/// Finds an `n`-level necklace grid: contracts the necklaces to rays along
/// transversal paths, runs the ray pipeline on the minor along the spine the
/// trails form, and expands the grid it returns, re-witnessing each vertical
/// necklace so that every attachment sits alone in an odd bead.
///
/// Family rays must be bidirected paths; for plain ray families the minor
/// would be the host itself, so use `main_pipeline` there.
pub fn necklace_pipeline(host: &RayedHost, n: u32, depth: usize) -> Result<NecklaceRun> {
    necklace_pipeline_with(host, n, depth, DEFAULT_PASSES)
}

/// Passes over the necklace pairs made by `necklace_pipeline`; two let every
/// pair recur, which the minor's analysis needs at threshold 2.
pub const DEFAULT_PASSES: usize = 2;

pub fn necklace_pipeline_with(
    host: &RayedHost,
    n: u32,
    depth: usize,
    passes: usize,
) -> Result<NecklaceRun> {
    let count = host.truncate(depth).rays.len();
    let transversal = build_transversal_paths(host, transversal_rounds(count, passes), depth)?;
    let minor = necklace_to_ray_minor(host, &transversal)?;
    let spine = trail_spine(&minor, &transversal, depth)?;
    let inner = pipeline_along(&minor.host, &spine, n, depth, Some(2))?;
    let (certificate, graph) = expand_certificate(host, &minor, &inner.certificate, depth)?;
    Ok(NecklaceRun {
        transversal,
        minor,
        inner,
        certificate,
        graph,
    })
}

fn expand_certificate(
    host: &RayedHost,
    minor: &StrongMinorMap,
    cert: &GridCertificate,
    depth: usize,
) -> Result<(NecklaceGridCertificate, MultiDigraph)> {
    if cert.orientation != Orientation::Out {
        return Err(Error::InvalidInput(
            "the minor's grid should be an out-grid".into(),
        ));
    }
    let t = host.truncate(depth);
    let mut girders = Vec::new();
    for gd in &cert.girders {
        let mut jumps = Vec::new();
        for part in &gd.parts {
            match part {
                GirderPart::Staircase { staircase } => {
                    for j in staircase.segments.iter().step_by(2) {
                        jumps.push(minor.expand(j)?);
                    }
                }
                GirderPart::Arch { path } => jumps.push(minor.expand(path)?),
                GirderPart::RayStep { .. } => {}
            }
        }
        girders.push(NecklaceGirder {
            level: gd.level,
            jumps,
        });
    }
    let ends: Vec<&PathSeq> = girders.iter().flat_map(|g| g.jumps.iter()).collect();
    let mut necklaces = BTreeMap::new();
    for (&level, vertical) in &cert.verticals {
        let ray = t.ray(vertical.index)?;
        let mut covered = BTreeSet::new();
        for a in &vertical.vertices {
            covered.extend(minor.parts[a].iter().copied());
        }
        let positions: Vec<usize> = ray
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| covered.contains(v))
            .map(|(p, _)| p)
            .collect();
        let (lo, hi) = (positions[0], positions[positions.len() - 1]);
        let piece = &ray.vertices[lo..=hi];
        let attachments: BTreeSet<usize> = ends
            .iter()
            .flat_map(|p| [p.first(), p.last()])
            .filter_map(|v| piece.iter().position(|w| *w == v))
            .collect();
        let necklace: Necklace = rewitness(piece, &attachments).ok_or_else(|| {
            Error::obstruction(
                format!("room for the attachments of necklace {}", vertical.index),
                depth,
            )
        })?;
        necklaces.insert(level, necklace);
    }
    let kind = NecklaceKind::from_grid_kind(cert.kind);
    let mut out = NecklaceGridCertificate {
        kind,
        necklaces,
        girders,
        parity: Vec::new(),
        depth,
    };
    let g = out.subgraph(&t.graph);
    out.parity = parity_log(&g, &out.necklaces).map_err(|r| Error::InvalidInput(r.to_string()))?;
    Ok((out, g))
}
