//! Typed data spaces: schemas, points, validation, sampling and distance.

mod metric;
mod point;
mod real;
mod sample;
mod schema;

pub use metric::{distance, min_separation};
pub(crate) use metric::distance_unchecked;
pub use point::{validate_point, Point, Value, Verdict, Violation, ViolationReason};
pub use real::{Real, RealError};
pub use sample::{random_point, random_pool};
pub use schema::{FeatureDescriptor, FeatureKind, RealRange, SchemaKind, SpaceSchema};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid point: {0}")]
    InvalidPoint(Verdict),
    #[error("invalid value: {0}")]
    Value(String),
    #[error("feature {feature:?} has no finite bounds to sample from")]
    SamplingUnsupported { feature: String },
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(String),
}
