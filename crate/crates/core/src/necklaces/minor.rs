use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{validate_necklace, Necklace};
use crate::analysis::pair_schedule;
use crate::catalog::finite_host;
use crate::error::{Error, Result};
use crate::graph::{
    shortest_path, strong_components, EdgeId, MultiDigraph, PathQuery, PathSeq, VertexId,
};
use crate::rays::{Certification, Orientation, RayIndex, RayPrefix, RayedHost, Truncation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalPath {
    pub round: usize,
    pub from: RayIndex,
    pub to: RayIndex,
    pub path: PathSeq,
}

/// Pairwise disjoint paths between necklaces, one per round, with the beads
/// each round had to stay above.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    pub necklaces: BTreeMap<RayIndex, Necklace>,
    pub paths: Vec<TransversalPath>,
    /// Per round and necklace, the bead every later path stays above; the
    /// earlier paths never reach it.
    pub floors: Vec<BTreeMap<RayIndex, usize>>,
    pub depth: usize,
}

impl Transversal {
    /// Distinct floor beads per necklace, increasing and at least 2 apart.
    pub fn cut_beads(&self) -> BTreeMap<RayIndex, BTreeSet<usize>> {
        let mut out: BTreeMap<RayIndex, BTreeSet<usize>> = BTreeMap::new();
        for round in &self.floors {
            for (r, b) in round {
                out.entry(*r).or_default().insert(*b);
            }
        }
        out
    }
}

/// Necklace witnesses of the family rays, which must be bidirected paths.
pub fn family_necklaces(t: &Truncation) -> Result<BTreeMap<RayIndex, Necklace>> {
    let mut out = BTreeMap::new();
    for (r, ray) in &t.rays {
        let n = Necklace::of_bidirected_path(ray);
        if n.beads.is_empty() || validate_necklace(&n, &t.graph).is_err() {
            return Err(Error::InvalidInput(format!(
                "ray {r} is not a bidirected path"
            )));
        }
        out.insert(*r, n);
    }
    Ok(out)
}

/// Ordered necklace pairs, nearest first, cycled for `rounds` paths.
fn pair_cycle(indices: &[RayIndex], rounds: usize) -> Vec<(RayIndex, RayIndex)> {
    let seq = pair_schedule(indices, 1);
    let pairs: Vec<(RayIndex, RayIndex)> = seq.windows(2).map(|w| (w[0], w[1])).collect();
    pairs
        .iter()
        .copied()
        .cycle()
        .take(if pairs.is_empty() { 0 } else { rounds })
        .collect()
}

/// Runs `rounds` rounds over the necklace pairs. Each round's floor on a
/// necklace is the first bead above every earlier path, kept at least two
/// beads above the previous floor when it has to move; the new path joins
/// the two necklaces' beads above their floors and avoids every bead up to
/// every floor.
pub fn build_transversal_paths(
    host: &RayedHost,
    rounds: usize,
    depth: usize,
) -> Result<Transversal> {
    if host.orientation != Orientation::Out {
        return Err(Error::BadParameters(
            "necklace families are handled as out-families".into(),
        ));
    }
    let t = host.truncate(depth);
    let necklaces = family_necklaces(&t)?;
    let indices: Vec<RayIndex> = necklaces.keys().copied().collect();
    if indices.len() < 2 && rounds > 0 {
        return Err(Error::BadParameters(
            "transversal paths need two necklaces".into(),
        ));
    }
    let mut paths: Vec<TransversalPath> = Vec::new();
    let mut floors: Vec<BTreeMap<RayIndex, usize>> = Vec::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    for (round, (from, to)) in pair_cycle(&indices, rounds).into_iter().enumerate() {
        let mut floor = BTreeMap::new();
        for (r, n) in &necklaces {
            let touched = n
                .beads
                .iter()
                .rposition(|b| !b.is_disjoint(&used))
                .map_or(1, |l| l + 1);
            let f = match floors.last().map(|f: &BTreeMap<RayIndex, usize>| f[r]) {
                Some(prev) if touched <= prev => prev,
                Some(prev) => touched.max(prev + 2),
                None => touched,
            };
            if f + 1 >= n.beads.len() {
                return Err(Error::obstruction(
                    format!("beads above floor {f} of necklace {r}"),
                    depth,
                ));
            }
            floor.insert(*r, f);
        }
        let mut forbidden = used.clone();
        for (r, n) in &necklaces {
            forbidden.extend(n.beads[..=floor[r]].iter().flatten().copied());
        }
        let above = |r: RayIndex| -> BTreeSet<VertexId> {
            necklaces[&r].beads[floor[&r] + 1..]
                .iter()
                .flatten()
                .filter(|v| !forbidden.contains(v))
                .copied()
                .collect()
        };
        let (sources, targets) = (above(from), above(to));
        let (a, b) = (necklaces[&from].union(), necklaces[&to].union());
        let interior = |v: VertexId| !a.contains(&v) && !b.contains(&v);
        let q = PathQuery::new(&sources, &targets, &forbidden).with_interior(&interior);
        let path = shortest_path(&t.graph, &q)
            .ok_or_else(|| Error::obstruction(format!("round {round}: {from} to {to}"), depth))?;
        used.extend(path.vertices.iter().copied());
        paths.push(TransversalPath {
            round,
            from,
            to,
            path,
        });
        floors.push(floor);
    }
    Ok(Transversal {
        necklaces,
        paths,
        floors,
        depth,
    })
}

/// A contraction of strongly connected host pieces, with its expansion.
#[derive(Clone, Debug)]
pub struct StrongMinorMap {
    /// The minor; its edges keep the ids of the host edges they come from.
    pub graph: MultiDigraph,
    /// Minor vertex to the host vertices it replaces.
    pub parts: BTreeMap<VertexId, BTreeSet<VertexId>>,
    part_of: BTreeMap<VertexId, VertexId>,
    /// The transversal paths as trails of the minor.
    pub trails: Vec<PathSeq>,
    /// The minor with each necklace as an out-ray.
    pub host: RayedHost,
    /// The host truncation's graph the expansion lives in.
    pub original: MultiDigraph,
}

impl StrongMinorMap {
    pub fn part_of(&self, v: VertexId) -> Option<VertexId> {
        self.part_of.get(&v).copied()
    }

    /// A host path from the part of the first vertex to the part of the
    /// last, crossing the host edges of `p` and running inside each part in
    /// between.
    pub fn expand(&self, p: &PathSeq) -> Result<PathSeq> {
        let Some(&e0) = p.edges.first() else {
            let part = &self.parts[&p.first()];
            return Ok(PathSeq::single(
                *part.iter().next().expect("parts are nonempty"),
            ));
        };
        let edge = |e: EdgeId| {
            self.original
                .edge(e)
                .ok_or(Error::InvalidInput(format!("edge {e} is not a host edge")))
        };
        let mut out = PathSeq::single(edge(e0)?.tail);
        for (k, &e) in p.edges.iter().enumerate() {
            let h = edge(e)?;
            if k > 0 {
                let part = &self.parts[&p.vertices[k]];
                let inside = self.original.induced(part);
                let (from, to) = (BTreeSet::from([out.last()]), BTreeSet::from([h.tail]));
                let none = BTreeSet::new();
                let walk = if out.last() == h.tail {
                    PathSeq::single(h.tail)
                } else {
                    shortest_path(&inside, &PathQuery::new(&from, &to, &none)).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "part {} is not strongly connected",
                            p.vertices[k]
                        ))
                    })?
                };
                out = out.concat(&walk)?;
            }
            out = out.concat(&PathSeq {
                vertices: vec![h.tail, h.head],
                edges: vec![e],
            })?;
        }
        Ok(out)
    }
}

/// Contracts the necklaces: in each floor bead only a directed path from the
/// previous bead to the next survives, and every strong component of what
/// is left of a necklace becomes one vertex, named by its smallest member.
/// The transversal paths ride along as trails.
pub fn necklace_to_ray_minor(host: &RayedHost, tr: &Transversal) -> Result<StrongMinorMap> {
    let t = host.truncate(tr.depth);
    let cuts = tr.cut_beads();
    let mut kept = MultiDigraph::new();
    let mut parts: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut part_of: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut rays = BTreeMap::new();
    for (r, n) in &tr.necklaces {
        let mut g = t.graph.induced(&n.union());
        for &l in cuts.get(r).into_iter().flatten() {
            let bead = &n.beads[l];
            let (prev, next) = (&n.beads[l - 1], &n.beads[l + 1]);
            let from: BTreeSet<VertexId> = bead.intersection(prev).copied().collect();
            let to: BTreeSet<VertexId> = bead.intersection(next).copied().collect();
            let none = BTreeSet::new();
            let path = shortest_path(&t.graph.induced(bead), &PathQuery::new(&from, &to, &none))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("bead {l} of necklace {r} has no way through"))
                })?;
            let private = n.private(l);
            let on_path = path.vertex_set();
            let drop: BTreeSet<VertexId> = private.difference(&on_path).copied().collect();
            g = g.without(&drop);
            let inner: Vec<EdgeId> = g
                .edges()
                .filter(|e| {
                    bead.contains(&e.tail) && bead.contains(&e.head) && !path.edges.contains(&e.id)
                })
                .map(|e| e.id)
                .collect();
            for e in inner {
                g.remove_edge(e);
            }
        }
        let sc = strong_components(&g);
        for c in &sc.components {
            let name = c[0];
            parts.insert(name, c.iter().copied().collect());
            for v in c {
                part_of.insert(*v, name);
            }
        }
        let mut order: Vec<VertexId> = Vec::new();
        for v in &t.rays[r].vertices {
            let Some(&p) = part_of.get(v) else { continue };
            if order.last() != Some(&p) {
                if order.contains(&p) {
                    return Err(Error::InvalidInput(format!(
                        "necklace {r} does not contract to a ray"
                    )));
                }
                order.push(p);
            }
        }
        rays.insert(*r, order);
        kept = kept.union(&g)?;
    }
    for tp in &tr.paths {
        for v in &tp.path.vertices {
            kept.add_vertex(*v);
            if !part_of.contains_key(v) {
                parts.insert(*v, BTreeSet::from([*v]));
                part_of.insert(*v, *v);
            }
        }
        for &e in &tp.path.edges {
            if kept.edge(e).is_none() {
                let h = t.graph.edge(e).expect("path edges are host edges");
                kept.add_edge_with_id(e, h.tail, h.head, h.multiplicity)?;
            }
        }
    }
    let mut graph = MultiDigraph::new();
    for p in parts.keys() {
        graph.add_vertex(*p);
    }
    for e in kept.edges() {
        let (a, b) = (part_of[&e.tail], part_of[&e.head]);
        if a != b {
            graph.add_edge_with_id(e.id, a, b, e.multiplicity)?;
        }
    }
    let trails = tr
        .paths
        .iter()
        .map(|tp| {
            let mut vertices = vec![part_of[&tp.path.first()]];
            let mut edges = Vec::new();
            for (k, &e) in tp.path.edges.iter().enumerate() {
                let p = part_of[&tp.path.vertices[k + 1]];
                if p != *vertices.last().expect("nonempty") {
                    vertices.push(p);
                    edges.push(e);
                }
            }
            PathSeq { vertices, edges }
        })
        .collect();
    let rays: BTreeMap<RayIndex, RayPrefix> = rays
        .into_iter()
        .map(|(index, vertices)| {
            (
                index,
                RayPrefix {
                    index,
                    orientation: Orientation::Out,
                    vertices,
                },
            )
        })
        .collect();
    let minor_host = finite_host(
        "necklace-minor",
        graph.clone(),
        rays,
        Orientation::Out,
        Certification::default(),
    );
    Ok(StrongMinorMap {
        graph,
        parts,
        part_of,
        trails,
        host: minor_host,
        original: t.graph.clone(),
    })
}
