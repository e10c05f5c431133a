//! Accept/reject outcomes shared by the recognizers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    // staircases
    NotAPath,
    WrongEndpoints,
    NontrivialityViolated,
    InternalRayContact,
    NotSimple,
    // grids
    GirderBroken,
    NotInHost,
    VerticalNotFamilyRay,
    VerticalsIntersect,
    GirderShape,
    ArchOrientation,
    AvoidanceViolated,
    RootTouched,
    DegreeTwoVertex,
    // tree-like models
    ImagesIntersect,
    NotArborescence,
    EdgeLandsWrongSide,
    // necklaces
    BeadNotStronglyConnected,
    NonConsecutiveIntersection,
    ConsecutiveDisjoint,
    ParityViolated,
    OddBeadOverloaded,
    ParityLogMismatch,
    // path families
    PathsIntersect,
    // separation checks
    PathFound,
    ComponentReachesFrontier,
    BadInstance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub reason: RejectReason,
    pub detail: String,
}

impl Reject {
    pub fn new(reason: RejectReason, detail: impl Into<String>) -> Self {
        Reject {
            reason,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Reject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.reason, self.detail)
    }
}

pub type Verdict = std::result::Result<(), Reject>;

/// Shorthand for an early rejection.
pub fn reject<T>(
    reason: RejectReason,
    detail: impl Into<String>,
) -> std::result::Result<T, Reject> {
    Err(Reject::new(reason, detail))
}
