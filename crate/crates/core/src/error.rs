use thiserror::Error;

use crate::graph::{EdgeId, VertexId};
use crate::rays::RayIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("edge id {0} is already in use")]
    DuplicateEdge(EdgeId),
    #[error("no edge from {0} to {1}")]
    MissingEdge(VertexId, VertexId),
    #[error("source or sink set is empty")]
    EmptyTerminalSet,
    #[error("vertex {0} does not lie on the ray")]
    VertexNotOnRay(VertexId),
    #[error("no ray with index {0}")]
    UnknownRayIndex(RayIndex),
    #[error("{stage}: no way forward in the truncation at depth {depth}")]
    ObstructionAtDepth { stage: String, depth: usize },
    #[error("the spine does not meet any ray of the index set")]
    SpineVisitsNoRay,
    #[error("({0},{1}) is not an edge of the quotient")]
    NotDinfEdge(RayIndex, RayIndex),
    #[error("model too small for {0} levels")]
    InsufficientModel(usize),
    #[error("no vertex of unbounded out-degree found")]
    NoInfiniteOutDegree,
    #[error("no vertex of unbounded in-degree found")]
    NoInfiniteInDegree,
    #[error("no branch could be certified at this depth: {0}")]
    Undetermined(String),
    #[error("reserve index set exhausted")]
    ReserveExhausted,
    #[error("necklace prefix too short to certify a tail")]
    PrefixTooShort,
    #[error("unknown host family {0:?}")]
    UnknownFamily(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn obstruction(stage: impl Into<String>, depth: usize) -> Self {
        Error::ObstructionAtDepth {
            stage: stage.into(),
            depth,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::DuplicateEdge(_) => "DuplicateEdge",
            Error::MissingEdge(..) => "MissingEdge",
            Error::EmptyTerminalSet => "EmptyTerminalSet",
            Error::VertexNotOnRay(_) => "VertexNotOnRay",
            Error::UnknownRayIndex(_) => "UnknownRayIndex",
            Error::ObstructionAtDepth { .. } => "ObstructionAtDepth",
            Error::SpineVisitsNoRay => "SpineVisitsNoRay",
            Error::NotDinfEdge(..) => "NotDinfEdge",
            Error::InsufficientModel(_) => "InsufficientModel",
            Error::NoInfiniteOutDegree => "NoInfiniteOutDegree",
            Error::NoInfiniteInDegree => "NoInfiniteInDegree",
            Error::Undetermined(_) => "Undetermined",
            Error::ReserveExhausted => "ReserveExhausted",
            Error::PrefixTooShort => "PrefixTooShort",
            Error::UnknownFamily(_) => "UnknownFamily",
            Error::BadParameters(_) => "BadParameters",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
