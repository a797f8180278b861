//! Shadow labels, shadow events along a motion, and influence relations.

mod events;
mod influence;
mod label;
mod relation;

pub use events::{classify_events, ShadowEvent};
pub use influence::{influence_relation, leave_one_out_relations, InfluenceOptions, Motion};
pub use label::ShadowLabel;
pub use relation::InfluenceRelation;

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShadowError {
    #[error("label length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid label character {0:?}")]
    BadLabel(char),
    #[error("segment of pursuer {pursuer} leaves the environment")]
    InfeasibleEdge { pursuer: usize },
    #[error("shadow correspondence is ambiguous near t = {t}")]
    AmbiguousCorrespondence { t: f64 },
    #[error("deadline passed")]
    Timeout,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
