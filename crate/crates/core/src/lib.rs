//! Builders and recognizers for grid-like substructures of infinite digraphs
//! presented through finite, monotone truncations.

pub mod analysis;
pub mod catalog;
pub mod contraction;
pub mod error;
pub mod graph;
pub mod grids;
pub mod io;
pub mod layout;
pub mod necklaces;
pub mod rays;
pub mod verdict;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, MultiDigraph, Multiplicity, PathSeq, VertexId};
pub use layout::GridKind;
pub use rays::{Orientation, RayIndex, RayPrefix, RayedHost, Truncation};
pub use verdict::{Reject, RejectReason, Verdict};
