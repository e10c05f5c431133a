use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::escape::{escape_ray, Escape};
use super::{component_in, join, longest_spine, ray_walk};
use crate::contraction::{contract, degree_dichotomy, ContractionResult, Dichotomy, Provenance};
use crate::error::{Error, Result};
use crate::graph::{strong_components, MultiDigraph, PathSeq, VertexId};
use crate::grids::jump;
use crate::rays::{down_closure, Orientation, RayIndex, RayedHost, Spine, Truncation};
use crate::verdict::{reject, RejectReason, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyDirection {
    /// Paths from each ray to every later ray; those sharing a start ray are disjoint.
    Forward,
    /// Paths from each ray to every earlier ray; those sharing an end ray are disjoint.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPath {
    pub from: RayIndex,
    pub to: RayIndex,
    pub path: PathSeq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFamily {
    pub direction: FamilyDirection,
    /// Increasing.
    pub indices: Vec<RayIndex>,
    pub paths: Vec<FamilyPath>,
}

impl PathFamily {
    pub fn get(&self, from: RayIndex, to: RayIndex) -> Option<&PathSeq> {
        self.paths
            .iter()
            .find(|p| p.from == from && p.to == to)
            .map(|p| &p.path)
    }

    /// The same family read in the reversed host.
    pub fn reversed(&self) -> PathFamily {
        PathFamily {
            direction: match self.direction {
                FamilyDirection::Forward => FamilyDirection::Backward,
                FamilyDirection::Backward => FamilyDirection::Forward,
            },
            indices: self.indices.clone(),
            paths: self
                .paths
                .iter()
                .map(|p| FamilyPath {
                    from: p.to,
                    to: p.from,
                    path: p.path.reversed(),
                })
                .collect(),
        }
    }

    /// The subfamily on `keep`.
    pub fn restrict(&self, keep: &BTreeSet<RayIndex>) -> PathFamily {
        PathFamily {
            direction: self.direction,
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|i| keep.contains(i))
                .collect(),
            paths: self
                .paths
                .iter()
                .filter(|p| keep.contains(&p.from) && keep.contains(&p.to))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum Branch {
    /// A strong component of the quotient with at least two rays.
    InfiniteStrongComponent {
        component: Vec<RayIndex>,
    },
    /// A directed path of the quotient, root first; `Out` when it runs
    /// towards later rays.
    DirectedRayInDinf {
        orientation: Orientation,
        rays: Vec<RayIndex>,
    },
    PathFamily {
        family: PathFamily,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureVerdict {
    pub branch: Branch,
    pub depth: usize,
    pub provenance: Provenance,
    pub approximate: bool,
}

/// Checks endpoints, interiors, completeness and the disjointness pattern of
/// a path family in the truncation at `depth`.
pub fn validate_path_family(f: &PathFamily, host: &RayedHost, depth: usize) -> Verdict {
    let t = host.truncate(depth);
    let idx: BTreeSet<RayIndex> = f.indices.iter().copied().collect();
    if idx.len() != f.indices.len() || f.indices.windows(2).any(|w| w[0] >= w[1]) {
        return reject(
            RejectReason::BadInstance,
            "indices must be strictly increasing",
        );
    }
    let mut seen = BTreeSet::new();
    for fp in &f.paths {
        let ordered = match f.direction {
            FamilyDirection::Forward => fp.from < fp.to,
            FamilyDirection::Backward => fp.from > fp.to,
        };
        if !ordered
            || !idx.contains(&fp.from)
            || !idx.contains(&fp.to)
            || !seen.insert((fp.from, fp.to))
        {
            return reject(
                RejectReason::BadInstance,
                format!("unexpected pair ({}, {})", fp.from, fp.to),
            );
        }
        if let Err(m) = fp.path.check_in(&t.graph) {
            return reject(
                RejectReason::NotAPath,
                format!("({}, {}): {m}", fp.from, fp.to),
            );
        }
        let on = |v: VertexId| t.ray_position(v).map(|x| x.0);
        if on(fp.path.first()) != Some(fp.from) || on(fp.path.last()) != Some(fp.to) {
            return reject(
                RejectReason::WrongEndpoints,
                format!("({}, {})", fp.from, fp.to),
            );
        }
        if fp
            .path
            .interior()
            .iter()
            .any(|v| on(*v).is_some_and(|r| idx.contains(&r)))
        {
            return reject(
                RejectReason::InternalRayContact,
                format!("({}, {})", fp.from, fp.to),
            );
        }
    }
    let pairs = idx
        .iter()
        .flat_map(|&a| idx.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| match f.direction {
            FamilyDirection::Forward => a < b,
            FamilyDirection::Backward => a > b,
        });
    if let Some((a, b)) = pairs.into_iter().find(|p| !seen.contains(p)) {
        return reject(
            RejectReason::BadInstance,
            format!("missing path ({a}, {b})"),
        );
    }
    let mut groups: BTreeMap<RayIndex, Vec<&FamilyPath>> = BTreeMap::new();
    for fp in &f.paths {
        let key = match f.direction {
            FamilyDirection::Forward => fp.from,
            FamilyDirection::Backward => fp.to,
        };
        groups.entry(key).or_default().push(fp);
    }
    for (key, group) in groups {
        for (n, a) in group.iter().enumerate() {
            let va = a.path.vertex_set();
            if let Some(b) = group[n + 1..]
                .iter()
                .find(|b| !va.is_disjoint(&b.path.vertex_set()))
            {
                return reject(
                    RejectReason::PathsIntersect,
                    format!(
                        "paths ({}, {}) and ({}, {}) share a vertex (key {key})",
                        a.from, a.to, b.from, b.to
                    ),
                );
            }
        }
    }
    Ok(())
}

fn verdict(branch: Branch, c: &ContractionResult, depth: usize) -> StructureVerdict {
    StructureVerdict {
        branch,
        depth,
        provenance: c.dinf.provenance,
        approximate: c.dinf.approximate,
    }
}

/// A quotient path as a ray, root first. It points away from its root
/// (`Out`) when it runs towards later rays.
fn as_ray(vs: Vec<RayIndex>) -> Branch {
    if vs.last() > vs.first() {
        Branch::DirectedRayInDinf {
            orientation: Orientation::Out,
            rays: vs,
        }
    } else {
        Branch::DirectedRayInDinf {
            orientation: Orientation::In,
            rays: vs.into_iter().rev().collect(),
        }
    }
}

/// A longest directed path of an acyclic quotient, smallest ids first on ties.
fn longest_path(g: &MultiDigraph) -> Vec<RayIndex> {
    let mut indeg: BTreeMap<VertexId, usize> = g.vertices().iter().map(|v| (*v, 0)).collect();
    for e in g.edges() {
        *indeg.get_mut(&e.head).expect("edge heads are vertices") += 1;
    }
    let mut ready: BTreeSet<VertexId> = indeg
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut best: BTreeMap<VertexId, (usize, Option<VertexId>)> = BTreeMap::new();
    while let Some(v) = ready.pop_first() {
        let here = *best.entry(v).or_insert((1, None));
        for w in g.out_neighbors(v) {
            let cand = (here.0 + 1, Some(v));
            let slot = best.entry(w).or_insert((1, None));
            if cand.0 > slot.0 {
                *slot = cand;
            }
            let d = indeg.get_mut(&w).expect("vertex");
            *d -= 1;
            if *d == 0 {
                ready.insert(w);
            }
        }
    }
    let Some((&end, _)) = best
        .iter()
        .max_by_key(|(v, (len, _))| (*len, std::cmp::Reverse(**v)))
    else {
        return Vec::new();
    };
    let mut out = vec![end];
    while let Some(prev) = best[out.last().expect("nonempty")].1 {
        out.push(prev);
    }
    out.reverse();
    out.into_iter().map(RayIndex::from_vertex).collect()
}

/// Whether `j` has unbounded out-degree in `c`: certified, or at least
/// `threshold` distinct out-neighbours.
fn thick_out(c: &ContractionResult, j: RayIndex, threshold: Option<u64>) -> bool {
    c.unbounded_out.contains(&j)
        || threshold.is_some_and(|t| c.neighbours(j, Orientation::Out).len() as u64 >= t)
}

/// Picks rays of unbounded out-degree, each among the out-neighbours of all
/// earlier picks. Returns the picks and the pool left when it stopped.
fn out_degree_chain(
    host: &RayedHost,
    spine: &Spine,
    all: &BTreeSet<RayIndex>,
    threshold: Option<u64>,
    size: usize,
) -> Result<(Vec<RayIndex>, BTreeSet<RayIndex>)> {
    let mut picks: Vec<RayIndex> = Vec::new();
    let mut pool = all.clone();
    while picks.len() < size {
        let within: BTreeSet<RayIndex> =
            picks.iter().copied().chain(pool.iter().copied()).collect();
        let c = contract(host, spine, &within, threshold)?;
        let after = picks.last().copied();
        let Some(j) = pool
            .iter()
            .copied()
            .filter(|j| Some(*j) > after)
            .find(|j| thick_out(&c, *j, threshold))
        else {
            break;
        };
        let out = c.neighbours(j, Orientation::Out);
        pool = pool
            .intersection(&out)
            .copied()
            .filter(|r| *r != j)
            .collect();
        picks.push(j);
    }
    Ok((picks, pool))
}

/// The trichotomy for a family at one truncation: a strong component of the
/// quotient, a directed path in it, or a forward path family of `size` rays.
///
/// Components need two rays and paths `size` rays to count. Without a
/// threshold only certified repetition is trusted.
pub fn analyze_out_structure(
    host: &RayedHost,
    depth: usize,
    threshold: Option<u64>,
    size: usize,
) -> Result<StructureVerdict> {
    if size < 2 {
        return Err(Error::BadParameters("a path family needs two rays".into()));
    }
    let spine = longest_spine(host, depth)?;
    analyze_out_with(host, &spine, depth, threshold, size)
}

/// [`analyze_out_structure`] along a given spine.
pub(crate) fn analyze_out_with(
    host: &RayedHost,
    spine: &Spine,
    depth: usize,
    threshold: Option<u64>,
    size: usize,
) -> Result<StructureVerdict> {
    if size < 2 {
        return Err(Error::BadParameters("a path family needs two rays".into()));
    }
    let spine = spine.clone();
    let t = host.truncate(depth);
    let all = t.ray_indices();
    let c = contract(host, &spine, &all, threshold)?;
    let sc = strong_components(&c.dinf.graph);
    if let Some(comp) = sc.nontrivial(&c.dinf.graph).max_by_key(|k| k.len()) {
        let component = comp.iter().map(|v| RayIndex::from_vertex(*v)).collect();
        return Ok(verdict(
            Branch::InfiniteStrongComponent { component },
            &c,
            depth,
        ));
    }
    let path = longest_path(&c.dinf.graph);
    if path.len() >= size {
        return Ok(verdict(as_ray(path), &c, depth));
    }
    let (picks, pool) = out_degree_chain(host, &spine, &all, threshold, size)?;
    if picks.len() >= size {
        let set: BTreeSet<RayIndex> = picks.iter().copied().collect();
        let cj = contract(host, &spine, &set, threshold)?;
        let mut paths = Vec::new();
        for (n, &a) in picks.iter().enumerate() {
            for &b in &picks[n + 1..] {
                let e = *cj
                    .edges_between(a, b)
                    .first()
                    .ok_or_else(|| Error::obstruction(format!("segment {a}->{b}"), depth))?;
                paths.push(FamilyPath {
                    from: a,
                    to: b,
                    path: cj.sigma[&e].clone(),
                });
            }
        }
        let family = PathFamily {
            direction: FamilyDirection::Forward,
            indices: picks,
            paths,
        };
        return Ok(verdict(Branch::PathFamily { family }, &cj, depth));
    }
    let stuck: BTreeSet<RayIndex> = picks.iter().copied().chain(pool).collect();
    let ck = contract(host, &spine, &stuck, threshold)?;
    let sink = match escape_ray(&ck.dinf.graph, &BTreeSet::new(), size, depth)? {
        Escape::OutPath { path } | Escape::InRayPrefix { path } => {
            let vs = path
                .vertices
                .iter()
                .map(|v| RayIndex::from_vertex(*v))
                .collect();
            return Ok(verdict(as_ray(vs), &ck, depth));
        }
        Escape::InfiniteInDegreeVertex { vertex, .. } => RayIndex::from_vertex(vertex),
    };
    let feeders: BTreeSet<RayIndex> = std::iter::once(sink)
        .chain(
            ck.dinf
                .graph
                .in_neighbors(sink.vertex())
                .into_iter()
                .map(RayIndex::from_vertex),
        )
        .collect();
    let c1 = contract(host, &spine, &feeders, threshold)?;
    let comp = component_in(&c1.dinf.graph, &feeders, sink);
    let hub = match degree_dichotomy(&c1, &comp, Orientation::Out, threshold) {
        Dichotomy::InfiniteDegreeVertex(k) => k,
        other => {
            return Err(Error::Undetermined(format!(
                "no hub of unbounded out-degree: {other:?}"
            )))
        }
    };
    let fans: BTreeSet<RayIndex> = c1
        .neighbours(hub, Orientation::Out)
        .difference(&comp)
        .copied()
        .collect();
    let family = fan_family(&t, hub, &comp, &fans, size, depth)?;
    Ok(verdict(Branch::PathFamily { family }, &c1, depth))
}

/// Routes every path through the hub ray: a path into the hub, a walk along
/// it, and one shared path out to a fresh fan ray. Each round's paths avoid
/// the down-closure of everything placed before.
fn fan_family(
    t: &Truncation,
    hub: RayIndex,
    comp: &BTreeSet<RayIndex>,
    fans: &BTreeSet<RayIndex>,
    size: usize,
    depth: usize,
) -> Result<PathFamily> {
    let all = t.ray_indices();
    let orientation = t.rays[&hub].orientation;
    let mut members = vec![*fans
        .first()
        .ok_or_else(|| Error::obstruction("fan rays", depth))?];
    let mut paths: Vec<FamilyPath> = Vec::new();
    let mut placed: BTreeSet<VertexId> = BTreeSet::new();
    let closure = |x: &BTreeSet<VertexId>| down_closure(x, &all, t);
    let vertices = |ps: &[PathSeq]| {
        ps.iter()
            .flat_map(|p| p.vertices.iter().copied())
            .collect::<BTreeSet<_>>()
    };
    while members.len() < size {
        let below = closure(&placed);
        let last = *members.last().expect("nonempty");
        let fresh = fans.iter().copied().filter(|x| *x > last);
        let round = match orientation {
            Orientation::Out => {
                let ins = members
                    .iter()
                    .map(|&i| jump(t, i, hub, &below, &[], Some(fans)))
                    .collect::<Option<Vec<_>>>();
                ins.and_then(|ins| {
                    let mut avoid = closure(&vertices(&ins));
                    avoid.extend(below.iter().copied());
                    fresh.into_iter().find_map(|x| {
                        jump(t, hub, x, &avoid, &[], Some(fans)).map(|o| (x, ins.clone(), o))
                    })
                })
            }
            Orientation::In => {
                let mut blocking = fans.clone();
                blocking.extend(comp.iter().copied());
                fresh.into_iter().find_map(|x| {
                    let o = jump(t, hub, x, &below, &[], Some(&blocking))?;
                    let mut avoid = closure(&o.vertex_set());
                    avoid.extend(below.iter().copied());
                    let ins = members
                        .iter()
                        .map(|&i| jump(t, i, hub, &avoid, &[], Some(fans)))
                        .collect::<Option<Vec<_>>>()?;
                    Some((x, ins, o))
                })
            }
        };
        let (x, ins, out) = round.ok_or_else(|| {
            Error::obstruction(format!("path family round {}", members.len()), depth)
        })?;
        for (&i, q) in members.iter().zip(&ins) {
            let walk = ray_walk(t, q.last(), out.first())
                .ok_or_else(|| Error::obstruction("walk along the hub", depth))?;
            let p = join(&[q, &walk, &out])?;
            placed.extend(p.vertices.iter().copied());
            paths.push(FamilyPath {
                from: i,
                to: x,
                path: p,
            });
        }
        members.push(x);
    }
    Ok(PathFamily {
        direction: FamilyDirection::Forward,
        indices: members,
        paths,
    })
}

/// The mirror of [`analyze_out_structure`]: analyses the reversed host and
/// reads the answer back, so path families come out backward.
pub fn analyze_in_structure(
    host: &RayedHost,
    depth: usize,
    threshold: Option<u64>,
    size: usize,
) -> Result<StructureVerdict> {
    let v = analyze_out_structure(&host.reversed(), depth, threshold, size)?;
    Ok(flip_verdict(v))
}

/// [`analyze_in_structure`] along a given spine of the reversed host.
pub(crate) fn analyze_in_with(
    host: &RayedHost,
    reversed_spine: &Spine,
    depth: usize,
    threshold: Option<u64>,
    size: usize,
) -> Result<StructureVerdict> {
    let v = analyze_out_with(&host.reversed(), reversed_spine, depth, threshold, size)?;
    Ok(flip_verdict(v))
}

fn flip_verdict(v: StructureVerdict) -> StructureVerdict {
    let branch = match v.branch {
        Branch::DirectedRayInDinf { orientation, rays } => Branch::DirectedRayInDinf {
            orientation: orientation.flip(),
            rays,
        },
        Branch::PathFamily { family } => Branch::PathFamily {
            family: family.reversed(),
        },
        b => b,
    };
    StructureVerdict { branch, ..v }
}
