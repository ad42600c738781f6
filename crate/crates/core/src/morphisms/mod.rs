//! Datamorphisms over a schema: traversals, the midpoint, compositions and
//! the path planner that witnesses completeness.

mod composition;
mod midpoint;
mod traversal;

pub use composition::{apply_composition, plan_path, Composition, Step, MAX_PATH_LEN, MIN_DELTA};
pub use midpoint::{contraction_check, midpoint};
pub use traversal::{apply_traversal, Direction, Traversal};

pub(crate) use midpoint::midpoint_unchecked;
pub(crate) use traversal::apply_traversal_unchecked;

use crate::space::{validate_point, Point, SpaceSchema, Verdict};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MorphError {
    #[error("invalid point: {0}")]
    InvalidPoint(Verdict),
    #[error("feature index {index} out of range for {len} features")]
    NoSuchFeature { index: usize, len: usize },
    #[error("midpoint contraction needs distance above {min_separation}, got {distance}")]
    Inapplicable { distance: f64, min_separation: f64 },
    #[error("tolerance {delta} not allowed (schema has real features: {has_real})")]
    BadTolerance { delta: f64, has_real: bool },
    #[error("path longer than {limit} steps")]
    PathTooLong { limit: usize },
    #[error("{0}")]
    Parse(String),
}

fn check_point(schema: &SpaceSchema, p: &Point) -> Result<(), MorphError> {
    let verdict = validate_point(schema, p);
    if verdict.is_ok() {
        Ok(())
    } else {
        Err(MorphError::InvalidPoint(verdict))
    }
}
