use rand::{Rng, RngExt};

use super::point::{Point, Value};
use super::real::Real;
use super::schema::{FeatureKind, SpaceSchema};
use super::SpaceError;

/// Real coordinates are drawn from the grid of multiples of 2^-48 inside
/// `[lo, hi]`, which leaves 42 bits of exact halving below every seed.
const SAMPLE_GRID_SHIFT: u32 = Real::FRAC_BITS - 48;

/// Draws one point uniformly, each coordinate independently.
pub fn random_point<R: Rng + ?Sized>(schema: &SpaceSchema, rng: &mut R) -> Result<Point, SpaceError> {
    let mut values = Vec::with_capacity(schema.len());
    for (i, feature) in schema.features().iter().enumerate() {
        let v = match &feature.kind {
            FeatureKind::Categorical { values } => {
                Value::Symbol(values[rng.random_range(0..values.len())].clone())
            }
            kind @ (FeatureKind::Integer { .. } | FeatureKind::Natural { .. }) => {
                match kind.int_bounds() {
                    Some((Some(min), Some(max))) => Value::Int(rng.random_range(min..=max)),
                    _ => {
                        return Err(SpaceError::SamplingUnsupported {
                            feature: feature.name.clone(),
                        })
                    }
                }
            }
            FeatureKind::Real { .. } => {
                let range = schema.real_range(i).expect("real feature has a range");
                let unit = 1i128 << SAMPLE_GRID_SHIFT;
                let first = (range.lo.raw() + unit - 1).div_euclid(unit);
                let last = range.hi.raw().div_euclid(unit);
                let k = rng.random_range(first..=last);
                Value::Real(Real::from_raw(k * unit))
            }
        };
        values.push(v);
    }
    Ok(Point::new(values))
}

/// `n` independent draws.
pub fn random_pool<R: Rng + ?Sized>(schema: &SpaceSchema, n: usize, rng: &mut R) -> Result<Vec<Point>, SpaceError> {
    (0..n).map(|_| random_point(schema, rng)).collect()
}
