//! Block distance over mixed feature kinds.
//!
//! Categorical coordinates contribute a Hamming count, integer coordinates an
//! absolute difference, and real coordinates enter through one Euclidean norm
//! over the real sub-vector. The total is the sum of the three blocks, which
//! is exactly the Hamming, Manhattan or Euclidean metric on a pure schema.

use super::point::{validate_point, Point, Value};
use super::schema::SpaceSchema;
use super::SpaceError;

pub fn distance(schema: &SpaceSchema, x: &Point, y: &Point) -> Result<f64, SpaceError> {
    for p in [x, y] {
        let verdict = validate_point(schema, p);
        if !verdict.is_ok() {
            return Err(SpaceError::InvalidPoint(verdict));
        }
    }
    Ok(distance_unchecked(x, y))
}

/// Distance between two points already known to be valid for one schema.
/// Feature kinds are read off the values themselves.
pub(crate) fn distance_unchecked(x: &Point, y: &Point) -> f64 {
    let mut hamming: u64 = 0;
    let mut manhattan: u128 = 0;
    let mut squares = 0.0f64;
    let mut nonzero_reals = 0usize;
    let mut last_real = 0.0f64;
    for (a, b) in x.values().iter().zip(y.values()) {
        match (a, b) {
            (Value::Symbol(s), Value::Symbol(t)) => hamming += u64::from(s != t),
            (Value::Int(s), Value::Int(t)) => {
                manhattan += (i128::from(*s) - i128::from(*t)).unsigned_abs();
            }
            (Value::Real(s), Value::Real(t)) => {
                if s != t {
                    let d = s.abs_diff_f64(*t);
                    squares += d * d;
                    nonzero_reals += 1;
                    last_real = d;
                }
            }
            _ => unreachable!("points validated against one schema"),
        }
    }
    // A single differing real coordinate needs no square root; this keeps
    // one-coordinate brackets exact.
    let euclid = match nonzero_reals {
        0 => 0.0,
        1 => last_real,
        _ => squares.sqrt(),
    };
    hamming as f64 + manhattan as f64 + euclid
}

/// `δ_m`, the smallest distance between two distinct points: 0 when any
/// feature is real, otherwise 1.
pub fn min_separation(schema: &SpaceSchema) -> f64 {
    if schema.has_real() {
        0.0
    } else {
        1.0
    }
}
