use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{strong_components, EdgeId, MultiDigraph, VertexId};
use crate::rays::Orientation;
use crate::verdict::{reject, RejectReason, Verdict};

/// Finite stand-ins for the three infinite minors of strongly connected digraphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum Shape {
    /// Centre `0` joined both ways to leaves `1..=leaves`.
    BidirectedStar { leaves: u32 },
    /// Vertices `0..len` joined both ways in a line.
    BidirectedPath { len: u32 },
    /// A directed line on `0..len` rooted at `0`, plus an edge between the
    /// root and every other vertex. `Out`: line `0 -> 1 -> ...` with edges
    /// back into `0`. `In`: line `... -> 1 -> 0` with edges out of `0`.
    DominatedDirectedPath { len: u32, orientation: Orientation },
}

impl Shape {
    pub fn pattern(self) -> MultiDigraph {
        let mut g = MultiDigraph::new();
        let v = |k: u32| VertexId(k as u64);
        let both = |g: &mut MultiDigraph, a: u32, b: u32| {
            g.add_edge(v(a), v(b)).expect("vertices added");
            g.add_edge(v(b), v(a)).expect("vertices added");
        };
        match self {
            Shape::BidirectedStar { leaves } => {
                for k in 0..=leaves {
                    g.add_vertex(v(k));
                }
                for k in 1..=leaves {
                    both(&mut g, 0, k);
                }
            }
            Shape::BidirectedPath { len } => {
                for k in 0..len {
                    g.add_vertex(v(k));
                }
                for k in 1..len {
                    both(&mut g, k - 1, k);
                }
            }
            Shape::DominatedDirectedPath { len, orientation } => {
                for k in 0..len {
                    g.add_vertex(v(k));
                }
                for k in 1..len {
                    let (line, dom) = match orientation {
                        Orientation::Out => ((k - 1, k), (k, 0)),
                        Orientation::In => ((k, k - 1), (0, k)),
                    };
                    g.add_edge(v(line.0), v(line.1)).expect("vertices added");
                    g.add_edge(v(dom.0), v(dom.1)).expect("vertices added");
                }
            }
        }
        g
    }

    /// Pattern vertices in the order a search should place them.
    fn order(self) -> Vec<VertexId> {
        let n = match self {
            Shape::BidirectedStar { leaves } => leaves + 1,
            Shape::BidirectedPath { len } | Shape::DominatedDirectedPath { len, .. } => len,
        };
        (0..n as u64).map(VertexId).collect()
    }
}

/// An in-arborescence and an out-arborescence sharing only `root`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexImage {
    pub root: VertexId,
    /// Edges oriented towards the root.
    pub in_edges: Vec<EdgeId>,
    /// Edges oriented away from the root.
    pub out_edges: Vec<EdgeId>,
}

impl VertexImage {
    pub fn single(root: VertexId) -> Self {
        VertexImage {
            root,
            in_edges: Vec::new(),
            out_edges: Vec::new(),
        }
    }

    fn side(&self, g: &MultiDigraph, edges: &[EdgeId]) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::from([self.root]);
        for e in edges {
            if let Some(e) = g.edge(*e) {
                out.insert(e.tail);
                out.insert(e.head);
            }
        }
        out
    }

    pub fn in_vertices(&self, g: &MultiDigraph) -> BTreeSet<VertexId> {
        self.side(g, &self.in_edges)
    }

    pub fn out_vertices(&self, g: &MultiDigraph) -> BTreeSet<VertexId> {
        self.side(g, &self.out_edges)
    }

    pub fn vertices(&self, g: &MultiDigraph) -> BTreeSet<VertexId> {
        let mut v = self.in_vertices(g);
        v.extend(self.out_vertices(g));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLikeModel {
    pub shape: Option<Shape>,
    pub pattern: MultiDigraph,
    pub vertex_images: BTreeMap<VertexId, VertexImage>,
    pub edge_images: BTreeMap<EdgeId, EdgeId>,
}

impl TreeLikeModel {
    /// Root of the image of pattern vertex `v`.
    pub fn root(&self, v: VertexId) -> Option<VertexId> {
        self.vertex_images.get(&v).map(|i| i.root)
    }
}

/// Checks that `edges` form an arborescence on `vertices` rooted at `root`,
/// oriented towards the root (`towards`) or away from it.
fn is_arborescence(g: &MultiDigraph, root: VertexId, edges: &[EdgeId], towards: bool) -> bool {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for e in edges {
        let Some(e) = g.edge(*e) else { return false };
        let (child, par) = if towards {
            (e.tail, e.head)
        } else {
            (e.head, e.tail)
        };
        if child == root || parent.insert(child, par).is_some() {
            return false;
        }
    }
    // every vertex must climb to the root without cycling
    for &start in parent.keys() {
        let mut cur = start;
        let mut steps = 0;
        while cur != root {
            match parent.get(&cur) {
                Some(p) if steps <= parent.len() => {
                    cur = *p;
                    steps += 1;
                }
                _ => return false,
            }
        }
    }
    true
}

pub fn validate_tree_like_model(m: &TreeLikeModel, g: &MultiDigraph) -> Verdict {
    let mut used: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for v in m.pattern.vertices() {
        let Some(img) = m.vertex_images.get(v) else {
            return reject(
                RejectReason::BadInstance,
                format!("pattern vertex {v} has no image"),
            );
        };
        if !g.contains_vertex(img.root) {
            return reject(
                RejectReason::NotInHost,
                format!("root {} of image {v}", img.root),
            );
        }
        if img
            .in_edges
            .iter()
            .chain(&img.out_edges)
            .any(|e| g.edge(*e).is_none())
        {
            return reject(
                RejectReason::NotInHost,
                format!("image {v} uses a missing edge"),
            );
        }
        if !is_arborescence(g, img.root, &img.in_edges, true)
            || !is_arborescence(g, img.root, &img.out_edges, false)
        {
            return reject(RejectReason::NotArborescence, format!("image {v}"));
        }
        let (ins, outs) = (img.in_vertices(g), img.out_vertices(g));
        if ins.intersection(&outs).ne([&img.root]) {
            return reject(
                RejectReason::NotArborescence,
                format!("image {v}: trees share more than the root"),
            );
        }
        for w in ins.union(&outs) {
            if let Some(other) = used.insert(*w, *v) {
                return reject(
                    RejectReason::ImagesIntersect,
                    format!("images {other} and {v} share {w}"),
                );
            }
        }
    }
    for e in m.pattern.edges() {
        let Some(host_e) = m.edge_images.get(&e.id).and_then(|h| g.edge(*h)) else {
            return reject(
                RejectReason::BadInstance,
                format!("pattern edge {} has no image", e.id),
            );
        };
        let tail_ok = m.vertex_images[&e.tail]
            .out_vertices(g)
            .contains(&host_e.tail);
        let head_ok = m.vertex_images[&e.head]
            .in_vertices(g)
            .contains(&host_e.head);
        if !tail_ok || !head_ok {
            return reject(
                RejectReason::EdgeLandsWrongSide,
                format!("image of pattern edge {}", e.id),
            );
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSearch {
    Found(TreeLikeModel),
    NotFound,
}

/// A candidate image with its vertex sides precomputed.
#[derive(Clone, Debug)]
struct Candidate {
    image: VertexImage,
    all: BTreeSet<VertexId>,
    ins: BTreeSet<VertexId>,
    outs: BTreeSet<VertexId>,
}

/// All images rooted anywhere with at most `bound` vertices.
fn candidates(g: &MultiDigraph, bound: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for &root in g.vertices() {
        grow(g, VertexImage::single(root), bound, &mut out, &mut seen);
    }
    out
}

fn grow(
    g: &MultiDigraph,
    img: VertexImage,
    bound: usize,
    out: &mut Vec<Candidate>,
    seen: &mut BTreeSet<(VertexId, Vec<EdgeId>, Vec<EdgeId>)>,
) {
    let mut key_in = img.in_edges.clone();
    let mut key_out = img.out_edges.clone();
    key_in.sort();
    key_out.sort();
    if !seen.insert((img.root, key_in, key_out)) {
        return;
    }
    let ins = img.in_vertices(g);
    let outs = img.out_vertices(g);
    let all: BTreeSet<VertexId> = ins.union(&outs).copied().collect();
    out.push(Candidate {
        image: img.clone(),
        all: all.clone(),
        ins: ins.clone(),
        outs: outs.clone(),
    });
    if all.len() >= bound {
        return;
    }
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        // a new leaf pointing into the in-tree
        if ins.contains(&e.head) && !all.contains(&e.tail) {
            let mut next = img.clone();
            next.in_edges.push(e.id);
            grow(g, next, bound, out, seen);
        }
        // a new leaf hanging off the out-tree
        if outs.contains(&e.tail) && !all.contains(&e.head) {
            let mut next = img.clone();
            next.out_edges.push(e.id);
            grow(g, next, bound, out, seen);
        }
    }
}

/// Smallest-id host edge from `outs` into `ins`.
fn link(g: &MultiDigraph, outs: &BTreeSet<VertexId>, ins: &BTreeSet<VertexId>) -> Option<EdgeId> {
    g.edges()
        .find(|e| outs.contains(&e.tail) && ins.contains(&e.head))
        .map(|e| e.id)
}

/// Searches for a tree-like model of `shape` in `g` whose vertex images
/// have at most `bound` vertices, trying smaller images first.
///
/// The answer is exact for the bound. `g` must be strongly connected.
pub fn find_bounded_minor(g: &MultiDigraph, shape: Shape, bound: usize) -> ModelSearch {
    if g.vertex_count() == 0 || strong_components(g).components.len() != 1 {
        return ModelSearch::NotFound;
    }
    let pattern = shape.pattern();
    let order = shape.order();
    for b in 1..=bound.max(1) {
        let cands = candidates(g, b);
        let mut chosen: Vec<usize> = Vec::new();
        if place(g, &pattern, &order, &cands, &mut chosen) {
            let vertex_images: BTreeMap<VertexId, VertexImage> = order
                .iter()
                .zip(&chosen)
                .map(|(v, &c)| (*v, cands[c].image.clone()))
                .collect();
            let mut edge_images = BTreeMap::new();
            for e in pattern.edges() {
                let (a, b) = (
                    &cands[chosen[e.tail.0 as usize]],
                    &cands[chosen[e.head.0 as usize]],
                );
                edge_images.insert(
                    e.id,
                    link(g, &a.outs, &b.ins).expect("checked while placing"),
                );
            }
            return ModelSearch::Found(TreeLikeModel {
                shape: Some(shape),
                pattern,
                vertex_images,
                edge_images,
            });
        }
    }
    ModelSearch::NotFound
}

fn place(
    g: &MultiDigraph,
    pattern: &MultiDigraph,
    order: &[VertexId],
    cands: &[Candidate],
    chosen: &mut Vec<usize>,
) -> bool {
    let k = chosen.len();
    if k == order.len() {
        return true;
    }
    let v = order[k];
    'cand: for (i, c) in cands.iter().enumerate() {
        for &j in chosen.iter() {
            if !cands[j].all.is_disjoint(&c.all) {
                continue 'cand;
            }
        }
        for e in pattern.edges() {
            let (t, h) = (e.tail.0 as usize, e.head.0 as usize);
            let ok = if e.tail == v && h < k {
                link(g, &c.outs, &cands[chosen[h]].ins).is_some()
            } else if e.head == v && t < k {
                link(g, &cands[chosen[t]].outs, &c.ins).is_some()
            } else {
                !(e.tail == v && e.head == v)
            };
            if !ok {
                continue 'cand;
            }
        }
        chosen.push(i);
        if place(g, pattern, order, cands, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
