//! Certificate documents and their DOT rendering.

use digrid::catalog::{instantiate, HostSpec};
use digrid::grids::{validate_grid, GirderPart, GridCertificate};
use digrid::io::{check_schema, to_dot, DotStyle, GraphDoc, SCHEMA};
use digrid::necklaces::{validate_necklace_grid, NecklaceGridCertificate};
use digrid::verdict::{reject, RejectReason, Verdict};
use digrid::MultiDigraph;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const GRID: &str = "grid-certificate";
pub const NECKLACE: &str = "necklace-certificate";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridDoc {
    pub host: HostSpec,
    pub depth: usize,
    pub graph: GraphDoc,
    pub certificate: GridCertificate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NecklaceDoc {
    pub host: HostSpec,
    pub depth: usize,
    pub graph: GraphDoc,
    pub certificate: NecklaceGridCertificate,
}

/// `body` as a tagged JSON object with `extra` fields appended.
pub fn tagged<T: Serialize>(kind: &str, body: &T, extra: Map<String, Value>) -> String {
    let mut obj = Map::new();
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("kind".into(), kind.into());
    if let Value::Object(fields) = serde_json::to_value(body).expect("serializable") {
        obj.extend(fields);
    }
    obj.extend(extra);
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    text.push('\n');
    text
}

fn bad(message: String) -> CliError {
    CliError {
        code: "InvalidInput".into(),
        message,
        details: Value::Null,
    }
}

fn header(text: &str) -> Result<(Value, String), CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("not JSON: {e}")))?;
    let schema = v.get("schema").and_then(Value::as_str).unwrap_or_default();
    check_schema(schema)?;
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    Ok((v, kind))
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| bad(e.to_string()))
}

/// Checks any certificate document. `Err` is for documents that cannot be
/// read at all; a readable but wrong certificate is a rejecting verdict.
pub fn validate_text(text: &str) -> Result<(String, Verdict), CliError> {
    let (v, kind) = header(text)?;
    let verdict = match kind.as_str() {
        GRID => {
            let doc: GridDoc = parse(v)?;
            let host = instantiate(&doc.host)?;
            validate_grid(&doc.graph.to_graph()?, &doc.certificate, &host, doc.depth)
        }
        NECKLACE => {
            let doc: NecklaceDoc = parse(v)?;
            let host = instantiate(&doc.host)?;
            let g = doc.graph.to_graph()?;
            if g.is_subgraph_of(&host.truncate(doc.depth).graph) {
                validate_necklace_grid(&g, &doc.certificate)
            } else {
                reject(
                    RejectReason::NotInHost,
                    "subgraph is not contained in the truncation",
                )
            }
        }
        other => return Err(bad(format!("cannot validate documents of kind {other:?}"))),
    };
    Ok((kind, verdict))
}

pub fn grid_style(cert: &GridCertificate, g: &MultiDigraph) -> DotStyle {
    let mut style = DotStyle::default();
    for r in cert.verticals.values() {
        for v in &r.vertices {
            style.vertex_class.insert(*v, "vertical".into());
        }
        for w in r.vertices.windows(2) {
            if let Some(e) = g.find_edge(w[0], w[1]) {
                style.edge_class.insert(e, "vertical".into());
            }
        }
    }
    for gd in &cert.girders {
        for part in &gd.parts {
            let class = match part {
                GirderPart::Arch { .. } => "arch",
                _ => "girder",
            };
            for e in part.path().edges {
                style.edge_class.entry(e).or_insert_with(|| class.into());
            }
        }
    }
    style
}

pub fn necklace_style(cert: &NecklaceGridCertificate) -> DotStyle {
    let mut style = DotStyle::default();
    for n in cert.necklaces.values() {
        for (l, bead) in n.beads.iter().enumerate() {
            // 0-based even beads are the ones that carry attachments
            let class = if l % 2 == 0 { "bead-odd" } else { "bead-even" };
            for v in bead {
                style.vertex_class.entry(*v).or_insert_with(|| class.into());
            }
        }
    }
    for gd in &cert.girders {
        for p in &gd.jumps {
            for e in &p.edges {
                style.edge_class.insert(*e, "girder".into());
            }
        }
    }
    style
}

/// DOT for a certificate document (styled) or any document with a `graph`.
pub fn dot_of_text(text: &str) -> Result<String, CliError> {
    let (v, kind) = header(text)?;
    match kind.as_str() {
        GRID => {
            let doc: GridDoc = parse(v)?;
            let g = doc.graph.to_graph()?;
            Ok(to_dot(&g, &grid_style(&doc.certificate, &g)))
        }
        NECKLACE => {
            let doc: NecklaceDoc = parse(v)?;
            Ok(to_dot(
                &doc.graph.to_graph()?,
                &necklace_style(&doc.certificate),
            ))
        }
        _ => {
            let graph = v
                .get("graph")
                .cloned()
                .ok_or_else(|| bad(format!("document of kind {kind:?} has no graph")))?;
            let g: GraphDoc = parse(graph)?;
            Ok(to_dot(&g.to_graph()?, &DotStyle::default()))
        }
    }
}
