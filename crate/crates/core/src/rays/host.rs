use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Certification, Orientation, RayIndex, RayPrefix};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, VertexId};

/// A finite piece of a host: the graph up to some depth and its ray prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub graph: MultiDigraph,
    pub rays: BTreeMap<RayIndex, RayPrefix>,
    /// Vertices next to the cut. A strong component touching none of them
    /// cannot grow at larger depths.
    pub frontier: BTreeSet<VertexId>,
    pub depth: usize,
    positions: HashMap<VertexId, (RayIndex, usize)>,
}

impl Truncation {
    pub fn new(
        graph: MultiDigraph,
        rays: BTreeMap<RayIndex, RayPrefix>,
        frontier: BTreeSet<VertexId>,
        depth: usize,
    ) -> Self {
        let mut positions = HashMap::new();
        for r in rays.values() {
            for (p, v) in r.vertices.iter().enumerate() {
                positions.insert(*v, (r.index, p));
            }
        }
        Truncation {
            graph,
            rays,
            frontier,
            depth,
            positions,
        }
    }

    pub fn ray(&self, i: RayIndex) -> Result<&RayPrefix> {
        self.rays.get(&i).ok_or(Error::UnknownRayIndex(i))
    }

    /// Ray and position of `v`, if it lies on a ray.
    pub fn ray_position(&self, v: VertexId) -> Option<(RayIndex, usize)> {
        self.positions.get(&v).copied()
    }

    pub fn on_ray(&self, v: VertexId) -> bool {
        self.positions.contains_key(&v)
    }

    pub fn ray_indices(&self) -> BTreeSet<RayIndex> {
        self.rays.keys().copied().collect()
    }

    pub fn ray_vertex_set(&self, i: RayIndex) -> Result<BTreeSet<VertexId>> {
        Ok(self.ray(i)?.vertices.iter().copied().collect())
    }

    /// Same truncation with every edge reversed and the rays re-oriented.
    pub fn reversed(&self) -> Truncation {
        let rays = self
            .rays
            .iter()
            .map(|(i, r)| {
                (
                    *i,
                    RayPrefix {
                        orientation: r.orientation.flip(),
                        ..r.clone()
                    },
                )
            })
            .collect();
        Truncation::new(
            self.graph.reverse(),
            rays,
            self.frontier.clone(),
            self.depth,
        )
    }

    pub fn check_rays(&self) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        for r in self.rays.values() {
            r.check_in(&self.graph)?;
            for v in &r.vertices {
                if !seen.insert(*v) {
                    return Err(format!("rays share vertex {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Produces the truncation at a given depth. Must be deterministic and monotone.
pub trait HostGenerator: Send + Sync {
    fn truncate(&self, depth: usize) -> Truncation;
}

/// A lazily generated infinite digraph together with a family of disjoint rays.
#[derive(Clone)]
pub struct RayedHost {
    pub orientation: Orientation,
    pub catalog_id: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub certification: Certification,
    generator: Arc<dyn HostGenerator>,
    reversed: bool,
    cache: Arc<Mutex<BTreeMap<usize, Arc<Truncation>>>>,
}

impl fmt::Debug for RayedHost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RayedHost")
            .field("orientation", &self.orientation)
            .field("catalog_id", &self.catalog_id)
            .field("parameters", &self.parameters)
            .field("reversed", &self.reversed)
            .finish()
    }
}

impl RayedHost {
    pub fn new(
        orientation: Orientation,
        catalog_id: impl Into<String>,
        parameters: BTreeMap<String, serde_json::Value>,
        certification: Certification,
        generator: Arc<dyn HostGenerator>,
    ) -> Self {
        RayedHost {
            orientation,
            catalog_id: catalog_id.into(),
            parameters,
            certification,
            generator,
            reversed: false,
            cache: Arc::default(),
        }
    }

    /// The truncation at `depth`; results are memoized.
    pub fn truncate(&self, depth: usize) -> Arc<Truncation> {
        if let Some(t) = self.cache.lock().expect("cache lock").get(&depth) {
            return t.clone();
        }
        let mut t = self.generator.truncate(depth);
        if self.reversed {
            t = t.reversed();
        }
        let t = Arc::new(t);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(depth, t.clone());
        t
    }

    /// The host with all edges reversed: out-rays become in-rays and vice versa.
    pub fn reversed(&self) -> RayedHost {
        RayedHost {
            orientation: self.orientation.flip(),
            catalog_id: self.catalog_id.clone(),
            parameters: self.parameters.clone(),
            certification: self.certification.reversed(),
            generator: self.generator.clone(),
            reversed: !self.reversed,
            cache: Arc::default(),
        }
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// The same host with different certification (used for derived hosts).
    pub fn with_certification(&self, certification: Certification) -> RayedHost {
        RayedHost {
            certification,
            cache: self.cache.clone(),
            ..self.clone()
        }
    }

    /// Checks monotonicity and ray disjointness between two consecutive depths.
    pub fn audit(&self, depth: usize) -> Result<()> {
        let a = self.truncate(depth);
        let b = self.truncate(depth + 1);
        let bad = |m: String| Error::BadParameters(format!("{}: {m}", self.catalog_id));
        a.check_rays().map_err(bad)?;
        b.check_rays().map_err(bad)?;
        if !a.graph.is_subgraph_of(&b.graph) {
            return Err(bad(format!(
                "depth {depth} is not contained in depth {}",
                depth + 1
            )));
        }
        for (i, r) in &a.rays {
            let later = b
                .rays
                .get(i)
                .ok_or_else(|| bad(format!("ray {i} disappears")))?;
            if !r.is_prefix_of(later) {
                return Err(bad(format!("ray {i} is not extended monotonically")));
            }
        }
        Ok(())
    }
}

/// A host that is the same finite graph at every depth.
pub struct ConstantHost {
    pub graph: MultiDigraph,
    pub rays: BTreeMap<RayIndex, RayPrefix>,
}

impl HostGenerator for ConstantHost {
    fn truncate(&self, depth: usize) -> Truncation {
        let frontier = self.rays.values().map(|r| r.tip()).collect();
        Truncation::new(self.graph.clone(), self.rays.clone(), frontier, depth)
    }
}
