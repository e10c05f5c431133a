//! JSON documents and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, MultiDigraph, PathSeq, VertexId};
use crate::rays::{Orientation, RayIndex, RayPrefix};

pub const SCHEMA: &str = "digrid/1";

fn schema() -> String {
    SCHEMA.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default = "schema")]
    pub schema: String,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl GraphDoc {
    pub fn from_graph(g: &MultiDigraph) -> Self {
        GraphDoc {
            schema: schema(),
            vertices: g.vertices().iter().copied().collect(),
            edges: g.edges().copied().collect(),
        }
    }

    pub fn to_graph(&self) -> Result<MultiDigraph> {
        check_schema(&self.schema)?;
        let mut g = MultiDigraph::new();
        for v in &self.vertices {
            g.add_vertex(*v);
        }
        for e in &self.edges {
            g.add_edge_with_id(e.id, e.tail, e.head, e.multiplicity)?;
        }
        Ok(g)
    }
}

pub fn check_schema(s: &str) -> Result<()> {
    if s == SCHEMA {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("unsupported schema {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayEntry {
    pub index: RayIndex,
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayFamilyDoc {
    pub orientation: Orientation,
    pub rays: Vec<RayEntry>,
}

impl RayFamilyDoc {
    pub fn from_rays<'a>(
        orientation: Orientation,
        rays: impl IntoIterator<Item = &'a RayPrefix>,
    ) -> Self {
        RayFamilyDoc {
            orientation,
            rays: rays
                .into_iter()
                .map(|r| RayEntry {
                    index: r.index,
                    vertices: r.vertices.clone(),
                })
                .collect(),
        }
    }

    pub fn to_rays(&self) -> BTreeMap<RayIndex, RayPrefix> {
        self.rays
            .iter()
            .map(|r| {
                (
                    r.index,
                    RayPrefix {
                        index: r.index,
                        orientation: self.orientation,
                        vertices: r.vertices.clone(),
                    },
                )
            })
            .collect()
    }
}

/// A graph together with its ray family, as exchanged on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostDoc {
    #[serde(default = "schema")]
    pub schema: String,
    pub graph: GraphDoc,
    pub family: RayFamilyDoc,
}

/// `{"beads":[[vertex...]...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub beads: Vec<Vec<VertexId>>,
}

/// Edge id to host vertex sequence.
pub fn sigma_doc(sigma: &BTreeMap<EdgeId, PathSeq>) -> BTreeMap<String, Vec<VertexId>> {
    sigma
        .iter()
        .map(|(e, p)| (e.0.to_string(), p.vertices.clone()))
        .collect()
}

/// Wraps any serializable value with the schema tag.
#[derive(Serialize)]
pub struct Tagged<'a, T: Serialize> {
    pub schema: &'static str,
    pub kind: &'a str,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn to_json<T: Serialize>(kind: &str, body: &T) -> String {
    serde_json::to_string_pretty(&Tagged {
        schema: SCHEMA,
        kind,
        body,
    })
    .expect("serializable")
}

/// Named vertex and edge classes for DOT styling.
#[derive(Clone, Debug, Default)]
pub struct DotStyle {
    pub vertex_class: BTreeMap<VertexId, String>,
    pub edge_class: BTreeMap<EdgeId, String>,
}

fn color(class: &str) -> &'static str {
    match class {
        "vertical" => "black",
        "girder" => "blue",
        "arch" => "red",
        "ray" => "gray40",
        "bead-odd" => "darkgreen",
        "bead-even" => "orange",
        _ => "gray70",
    }
}

/// DOT text. Vertex `id` is named `v<id>`; edges are listed by id.
pub fn to_dot(g: &MultiDigraph, style: &DotStyle) -> String {
    let mut s = String::from("digraph G {\n");
    for v in g.vertices() {
        match style.vertex_class.get(v) {
            Some(c) => writeln!(s, "  v{v} [class=\"{c}\", color={}];", color(c)),
            None => writeln!(s, "  v{v};"),
        }
        .expect("string write");
    }
    for e in g.edges() {
        let mult = match e.multiplicity {
            crate::graph::Multiplicity::Finite(1) => String::new(),
            crate::graph::Multiplicity::Finite(m) => format!(", label=\"{m}\""),
            crate::graph::Multiplicity::CertifiedUnbounded => ", label=\"inf\"".to_string(),
        };
        match style.edge_class.get(&e.id) {
            Some(c) => writeln!(
                s,
                "  v{} -> v{} [id=\"e{}\", class=\"{c}\", color={}{mult}];",
                e.tail,
                e.head,
                e.id,
                color(c)
            ),
            None => writeln!(s, "  v{} -> v{} [id=\"e{}\"{mult}];", e.tail, e.head, e.id),
        }
        .expect("string write");
    }
    s.push_str("}\n");
    s
}

/// Node names appearing in DOT text produced by [`to_dot`].
pub fn dot_node_names(dot: &str) -> BTreeSet<String> {
    dot.lines()
        .filter_map(|l| {
            let l = l.trim();
            let name = l.split([' ', ';']).next()?;
            (name.starts_with('v') && !l.contains("->")).then(|| name.to_string())
        })
        .collect()
}
