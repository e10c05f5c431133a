//! Catalog of lazily generated hosts.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, Multiplicity, VertexId};
use crate::io::HostDoc;
use crate::layout::{
    cross_edge_id, grid_vertex, ray_edge_id, stack_blocks, top_row, Block, GridKind, Step,
};
use crate::rays::{
    Certification, ConstantHost, HostGenerator, Orientation, PairPattern, RayIndex, RayPrefix,
    RayedHost, Truncation,
};

/// A catalog request: family name, parameters and declared certifications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub family: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub certifications: Vec<PairPattern>,
}

impl HostSpec {
    pub fn new(family: &str, parameters: Value) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        HostSpec {
            family: family.to_string(),
            parameters,
            certifications: Vec::new(),
        }
    }
}

/// Builds and audits a host from its spec.
pub fn instantiate(spec: &HostSpec) -> Result<RayedHost> {
    let p = &spec.parameters;
    let host = match spec.family.as_str() {
        "canonical-grid" => {
            let kind = grid_kind_param(p, "kind")?;
            let levels = u32_param(p, "levels", None)?;
            if levels < 2 {
                return Err(Error::BadParameters("levels must be at least 2".into()));
            }
            let spacing = u32_param(p, "spacing", Some(0))? as u64;
            canonical_grid_spaced(kind, levels, spacing)
        }
        "chain-dinf" => {
            let orientation = p
                .get("orientation")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::BadParameters("chain-dinf needs orientation".into()))?;
            match orientation {
                "in" => chain_dinf(GridKind::InwardDDQG),
                "out" => chain_dinf(GridKind::OutwardDDQG),
                other => return Err(Error::BadParameters(format!("orientation {other:?}"))),
            }
        }
        "funnel" => funnel(),
        "necklace-grid" => {
            let kind = p
                .get("kind")
                .and_then(Value::as_str)
                .and_then(crate::necklaces::NecklaceKind::from_slug)
                .ok_or_else(|| Error::BadParameters("necklace-grid needs a kind".into()))?;
            let levels = u32_param(p, "levels", None)?;
            if levels < 2 {
                return Err(Error::BadParameters("levels must be at least 2".into()));
            }
            crate::necklaces::necklace_grid_host(kind, levels)
        }
        "custom-finite" => {
            let doc: HostDoc = serde_json::from_value(
                p.get("host")
                    .cloned()
                    .ok_or_else(|| Error::BadParameters("custom-finite needs host".into()))?,
            )
            .map_err(|e| Error::BadParameters(e.to_string()))?;
            if !spec.certifications.is_empty() {
                return Err(Error::BadParameters(
                    "custom-finite hosts cannot certify patterns".into(),
                ));
            }
            custom_finite(&doc)?
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    for c in &spec.certifications {
        if !host.certification.patterns.contains(c) {
            return Err(Error::BadParameters(format!(
                "pattern {c:?} is not re-emitted by {}",
                spec.family
            )));
        }
    }
    host.audit(1)?;
    Ok(host)
}

fn u32_param(p: &BTreeMap<String, Value>, name: &str, default: Option<u32>) -> Result<u32> {
    match p.get(name) {
        Some(v) => v
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| {
                Error::BadParameters(format!("{name} must be a small nonnegative integer"))
            }),
        None => default.ok_or_else(|| Error::BadParameters(format!("missing parameter {name}"))),
    }
}

fn grid_kind_param(p: &BTreeMap<String, Value>, name: &str) -> Result<GridKind> {
    p.get(name)
        .and_then(Value::as_str)
        .and_then(GridKind::from_slug)
        .ok_or_else(|| {
            Error::BadParameters(format!(
                "{name} must be one of bidirected-qg, inward-ddqg, outward-ddqg"
            ))
        })
}

/// Widths of the blocks in a grid host.
#[derive(Clone, Copy, Debug)]
enum Widths {
    /// `2, 3, ..., n` repeated forever over exactly `n` rays.
    Periodic(u32),
    /// `2, 3, 4, ...`; depth `d` shows rays `1..=d+1`.
    Growing,
}

impl Widths {
    fn width(self, block: usize) -> u32 {
        match self {
            Widths::Periodic(n) => 2 + (block as u32 % (n - 1)),
            Widths::Growing => block as u32 + 2,
        }
    }

    fn rays(self, depth: usize) -> u32 {
        match self {
            Widths::Periodic(n) => n,
            Widths::Growing => (depth as u32 + 1).max(2),
        }
    }
}

struct GridHost {
    kind: GridKind,
    widths: Widths,
    spacing: u64,
}

impl GridHost {
    fn blocks(&self, depth: usize) -> Vec<Block> {
        stack_blocks(
            self.kind,
            (0..depth).map(|b| self.widths.width(b)),
            self.spacing,
        )
    }
}

/// Out-rays `1..=rays` as columns over rows `0..=top`, with the given cross edges.
fn columns(
    rays: u32,
    top: u64,
    cross: impl IntoIterator<Item = (VertexId, VertexId)>,
) -> (MultiDigraph, BTreeMap<RayIndex, RayPrefix>) {
    let mut g = MultiDigraph::new();
    let mut family = BTreeMap::new();
    for j in 1..=rays {
        let vertices: Vec<VertexId> = (0..=top).map(|y| grid_vertex(j, y)).collect();
        for v in &vertices {
            g.add_vertex(*v);
        }
        for w in vertices.windows(2) {
            g.add_edge_with_id(ray_edge_id(w[0]), w[0], w[1], Multiplicity::one())
                .expect("fresh ray edge");
        }
        family.insert(
            RayIndex(j),
            RayPrefix {
                index: RayIndex(j),
                orientation: Orientation::Out,
                vertices,
            },
        );
    }
    for (t, h) in cross {
        g.add_edge_with_id(cross_edge_id(t), t, h, Multiplicity::one())
            .expect("one cross edge per tail");
    }
    (g, family)
}

fn rows_from(g: &MultiDigraph, first: u64) -> BTreeSet<VertexId> {
    g.vertices()
        .iter()
        .copied()
        .filter(|v| crate::layout::grid_coords(*v).1 >= first)
        .collect()
}

impl HostGenerator for GridHost {
    fn truncate(&self, depth: usize) -> Truncation {
        let blocks = self.blocks(depth);
        let top = top_row(&blocks);
        let cross = blocks.iter().flat_map(|b| {
            b.steps().into_iter().filter_map(|s| match s {
                Step::Along { .. } => None,
                _ => Some(s.endpoints()),
            })
        });
        let (g, rays) = columns(self.widths.rays(depth), top, cross);
        let frontier = rows_from(&g, blocks.last().map_or(top, |b| b.start));
        Truncation::new(g, rays, frontier, depth)
    }
}

fn params(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

/// Pair patterns a grid of the given kind re-emits in every period.
pub(crate) fn grid_patterns(kind: GridKind, limit: Option<u32>) -> Vec<PairPattern> {
    match kind {
        GridKind::BidirectedQG => vec![PairPattern::Up { limit }, PairPattern::Down { limit }],
        GridKind::InwardDDQG => vec![
            PairPattern::Down { limit },
            PairPattern::OutOfFirst { limit },
        ],
        GridKind::OutwardDDQG => vec![PairPattern::Up { limit }, PairPattern::IntoFirst { limit }],
    }
}

/// The canonical grid of `kind` on exactly `levels` rays: girders of widths
/// `2..=levels` repeated forever, one block per depth step.
pub fn canonical_grid(kind: GridKind, levels: u32) -> RayedHost {
    canonical_grid_spaced(kind, levels, 0)
}

pub fn canonical_grid_spaced(kind: GridKind, levels: u32, spacing: u64) -> RayedHost {
    assert!(levels >= 2, "a grid needs two rays");
    RayedHost::new(
        Orientation::Out,
        "canonical-grid",
        params(json!({"kind": kind.slug(), "levels": levels, "spacing": spacing})),
        Certification::exact(grid_patterns(kind, Some(levels))),
        Arc::new(GridHost {
            kind,
            widths: Widths::Periodic(levels),
            spacing,
        }),
    )
}

/// A dominated directed grid whose girders each appear once, with widths
/// growing without bound. The quotient is a ray pointing towards ray 1
/// (inward) or away from it (outward), and ray 1 fans out (in) to every
/// other ray through the arches.
pub fn chain_dinf(kind: GridKind) -> RayedHost {
    let (cert, orient) = match kind {
        GridKind::InwardDDQG => (
            Certification {
                patterns: vec![PairPattern::Down { limit: None }],
                fan_out: BTreeSet::from([RayIndex(1)]),
                fan_in: BTreeSet::new(),
                exact: true,
            },
            "in",
        ),
        GridKind::OutwardDDQG => (
            Certification {
                patterns: vec![PairPattern::Up { limit: None }],
                fan_out: BTreeSet::new(),
                fan_in: BTreeSet::from([RayIndex(1)]),
                exact: true,
            },
            "out",
        ),
        GridKind::BidirectedQG => panic!("chain hosts are dominated grids"),
    };
    RayedHost::new(
        Orientation::Out,
        "chain-dinf",
        params(json!({"orientation": orient})),
        cert,
        Arc::new(GridHost {
            kind,
            widths: Widths::Growing,
            spacing: 0,
        }),
    )
}

/// Rows used by the funnel block that introduces ray `m`, starting at `start`.
///
/// Every older ray `j` sends an edge into ray 1, ray 1 sends one edge to
/// ray `m`, and ray `m` sends one edge back to each older ray other than 1.
pub fn funnel_block(m: u32, start: u64) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    let mut row = start;
    for j in 2..=m {
        out.push((grid_vertex(j, row), grid_vertex(1, row)));
        row += 1;
    }
    out.push((grid_vertex(1, row), grid_vertex(m, row)));
    row += 1;
    for j in (2..m).rev() {
        out.push((grid_vertex(m, row), grid_vertex(j, row)));
        row += 1;
    }
    out
}

pub fn funnel_block_height(m: u32) -> u64 {
    2 * m as u64 - 2
}

struct FunnelHost;

impl HostGenerator for FunnelHost {
    fn truncate(&self, depth: usize) -> Truncation {
        let mut cross = Vec::new();
        let mut start = 1;
        let mut last_start = 1;
        for m in 2..depth as u32 + 2 {
            cross.extend(funnel_block(m, start));
            last_start = start;
            start += funnel_block_height(m);
        }
        let rays = (depth as u32 + 1).max(2);
        let (g, family) = columns(rays, start, cross);
        let frontier = rows_from(&g, last_start);
        Truncation::new(g, family, frontier, depth)
    }
}

/// Host whose quotient is an in-star into ray 1 with no long directed path.
pub fn funnel() -> RayedHost {
    RayedHost::new(
        Orientation::Out,
        "funnel",
        BTreeMap::new(),
        Certification {
            patterns: vec![PairPattern::IntoFirst { limit: None }],
            fan_out: BTreeSet::from([RayIndex(1)]),
            fan_in: BTreeSet::new(),
            exact: true,
        },
        Arc::new(FunnelHost),
    )
}

/// A fixed finite graph presented as a host; certifies nothing.
pub fn custom_finite(doc: &HostDoc) -> Result<RayedHost> {
    crate::io::check_schema(&doc.schema)?;
    let graph = doc.graph.to_graph()?;
    let rays = doc.family.to_rays();
    if rays.is_empty() {
        return Err(Error::BadParameters("host has no rays".into()));
    }
    let orientation = doc.family.orientation;
    let host = ConstantHost { graph, rays };
    Ok(RayedHost::new(
        orientation,
        "custom-finite",
        BTreeMap::new(),
        Certification::default(),
        Arc::new(host),
    ))
}

/// A finite host built directly from a graph and rays (used for derived hosts).
pub fn finite_host(
    id: &str,
    graph: MultiDigraph,
    rays: BTreeMap<RayIndex, RayPrefix>,
    orientation: Orientation,
    certification: Certification,
) -> RayedHost {
    RayedHost::new(
        orientation,
        id,
        BTreeMap::new(),
        certification,
        Arc::new(ConstantHost { graph, rays }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_truncation_counts() {
        let h = canonical_grid(GridKind::BidirectedQG, 3);
        let t = h.truncate(5);
        assert_eq!(t.rays.len(), 3);
        t.check_rays().unwrap();
        // blocks of widths 2,3,2,3,2 have heights 2,4,2,4,2
        assert_eq!(t.rays[&RayIndex(1)].len(), 15);
        for d in 0..6 {
            h.audit(d).unwrap();
        }
    }

    #[test]
    fn growing_hosts_gain_rays() {
        for kind in [GridKind::InwardDDQG, GridKind::OutwardDDQG] {
            let h = chain_dinf(kind);
            assert_eq!(h.truncate(4).rays.len(), 5);
            for d in 0..5 {
                h.audit(d).unwrap();
            }
        }
        let f = funnel();
        assert_eq!(f.truncate(6).rays.len(), 7);
        for d in 0..5 {
            f.audit(d).unwrap();
        }
    }

    #[test]
    fn spec_round_trip_and_errors() {
        let spec = HostSpec::new(
            "canonical-grid",
            json!({"kind": "bidirected-qg", "levels": 3}),
        );
        let h = instantiate(&spec).unwrap();
        assert_eq!(h.truncate(5).rays.len(), 3);
        assert!(matches!(
            instantiate(&HostSpec::new("nope", json!({}))),
            Err(Error::UnknownFamily(_))
        ));
        let mut bad = spec.clone();
        bad.certifications
            .push(PairPattern::IntoFirst { limit: None });
        assert!(matches!(instantiate(&bad), Err(Error::BadParameters(_))));
        let ok = HostSpec {
            certifications: vec![PairPattern::Up { limit: Some(3) }],
            ..spec
        };
        instantiate(&ok).unwrap();
    }

    #[test]
    fn custom_finite_is_constant() {
        let h = canonical_grid(GridKind::OutwardDDQG, 2);
        let t = h.truncate(2);
        let doc = HostDoc {
            schema: crate::io::SCHEMA.into(),
            graph: crate::io::GraphDoc::from_graph(&t.graph),
            family: crate::io::RayFamilyDoc::from_rays(Orientation::Out, t.rays.values()),
        };
        let spec = HostSpec::new("custom-finite", json!({"host": doc}));
        let c = instantiate(&spec).unwrap();
        assert_eq!(c.truncate(1).graph, c.truncate(9).graph);
        assert!(!c.certification.exact);
        let declared = HostSpec {
            certifications: vec![PairPattern::Up { limit: None }],
            ..spec
        };
        assert!(matches!(
            instantiate(&declared),
            Err(Error::BadParameters(_))
        ));
    }
}
