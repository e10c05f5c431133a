use std::collections::BTreeMap;

use super::{Girder, GirderPart, GridCertificate, Staircase};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, PathSeq};
use crate::layout::{stack_blocks, Block, GridKind, Step};
use crate::rays::{Orientation, RayIndex, RayedHost};

/// Blocks drawn by a catalog grid host up to `depth`, if it is one.
fn catalog_blocks(host: &RayedHost, depth: usize) -> Option<(GridKind, Vec<Block>)> {
    let p = &host.parameters;
    match host.catalog_id.as_str() {
        "canonical-grid" => {
            let kind = GridKind::from_slug(p.get("kind")?.as_str()?)?;
            let levels = p.get("levels")?.as_u64()? as u32;
            let spacing = p.get("spacing").and_then(|s| s.as_u64()).unwrap_or(0);
            Some((
                kind,
                stack_blocks(
                    kind,
                    (0..depth).map(|b| 2 + (b as u32 % (levels - 1))),
                    spacing,
                ),
            ))
        }
        "chain-dinf" => {
            let kind = match p.get("orientation")?.as_str()? {
                "in" => GridKind::InwardDDQG,
                "out" => GridKind::OutwardDDQG,
                _ => return None,
            };
            Some((
                kind,
                stack_blocks(kind, (0..depth).map(|b| b as u32 + 2), 0),
            ))
        }
        _ => None,
    }
}

/// The certificate a catalog grid host carries by construction: rays
/// `1..=levels` as verticals and its first `levels - 1` blocks as girders.
/// Returns the certified subgraph with it.
pub fn natural_certificate(
    host: &RayedHost,
    levels: u32,
    depth: usize,
) -> Result<(MultiDigraph, GridCertificate)> {
    if host.orientation != Orientation::Out || host.is_reversed() {
        return Err(Error::BadParameters(
            "natural certificates exist for catalog out-ray grids only".into(),
        ));
    }
    let (kind, blocks) = catalog_blocks(host, depth).ok_or_else(|| {
        Error::BadParameters(format!("{} is not a catalog grid", host.catalog_id))
    })?;
    if levels < 2 {
        return Err(Error::BadParameters("a grid needs two levels".into()));
    }
    let t = host.truncate(depth);
    let mut girders = Vec::new();
    for n in 2..=levels {
        let b = blocks
            .iter()
            .find(|b| b.width == n)
            .ok_or_else(|| Error::obstruction(format!("girder {n}"), depth))?;
        girders.push(girder_of_block(b, &t.graph)?);
    }
    let mut verticals = BTreeMap::new();
    for l in 1..=levels {
        let r = t.ray(RayIndex(l))?;
        verticals.insert(l, r.clone());
    }
    let cert = GridCertificate {
        kind,
        orientation: Orientation::Out,
        verticals,
        girders,
        depth,
    };
    let g = cert.subgraph(&t.graph);
    Ok((g, cert))
}

fn edge(g: &MultiDigraph, s: &Step) -> Result<PathSeq> {
    let (a, b) = s.endpoints();
    PathSeq::from_vertices(g, vec![a, b])
}

/// Splits a block walk into staircases, the step on its own ray, and arches.
fn girder_of_block(b: &Block, g: &MultiDigraph) -> Result<Girder> {
    let w = b.width;
    let mut parts = Vec::new();
    let mut stair: Vec<Step> = Vec::new();
    let mut ray_step_done = false;
    let mut at_own = false;
    let flush = |stair: &mut Vec<Step>, parts: &mut Vec<GirderPart>| -> Result<()> {
        if stair.is_empty() {
            return Ok(());
        }
        let mut sequence = Vec::new();
        let mut segments = Vec::new();
        for s in stair.iter() {
            if let Step::Cross { from, to, .. } = *s {
                if sequence.is_empty() {
                    sequence.push(RayIndex(from));
                }
                sequence.push(RayIndex(to));
            }
            segments.push(edge(g, s)?);
        }
        parts.push(GirderPart::Staircase {
            staircase: Staircase {
                sequence,
                segments,
                simple: true,
            },
        });
        stair.clear();
        Ok(())
    };
    for s in b.steps() {
        match s {
            Step::Arch { to, .. } => {
                flush(&mut stair, &mut parts)?;
                parts.push(GirderPart::Arch { path: edge(g, &s)? });
                at_own = to == w;
            }
            Step::Along { ray, .. } if ray == w && at_own && !ray_step_done => {
                flush(&mut stair, &mut parts)?;
                parts.push(GirderPart::RayStep { path: edge(g, &s)? });
                ray_step_done = true;
            }
            Step::Cross { to, .. } => {
                stair.push(s);
                at_own = to == w;
            }
            Step::Along { .. } => stair.push(s),
        }
    }
    flush(&mut stair, &mut parts)?;
    Ok(Girder { level: w, parts })
}
