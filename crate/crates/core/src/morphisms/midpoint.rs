use crate::space::{distance_unchecked, min_separation, Point, SpaceSchema, Value};

use super::{check_point, MorphError};

/// Point between `x` and `y`.
///
/// Real coordinates take the average. Discrete coordinates that cannot be
/// split evenly (differing symbols, odd integer differences) alternate in
/// schema order: the 1st, 3rd, ... keep (or round toward) `x`, the 2nd,
/// 4th, ... take (or round toward) `y`. Even integer differences halve
/// exactly.
pub fn midpoint(schema: &SpaceSchema, x: &Point, y: &Point) -> Result<Point, MorphError> {
    check_point(schema, x)?;
    check_point(schema, y)?;
    Ok(midpoint_unchecked(x, y))
}

pub(crate) fn midpoint_unchecked(x: &Point, y: &Point) -> Point {
    let mut ambiguous = 0usize;
    let values = x
        .values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| match (a, b) {
            (Value::Real(s), Value::Real(t)) => Value::Real(s.midpoint(*t)),
            (Value::Symbol(s), Value::Symbol(t)) => {
                if s == t {
                    a.clone()
                } else {
                    ambiguous += 1;
                    if ambiguous % 2 == 1 { a.clone() } else { b.clone() }
                }
            }
            (Value::Int(s), Value::Int(t)) => {
                let (s, t) = (i128::from(*s), i128::from(*t));
                let d = t - s;
                let m = if d % 2 == 0 {
                    s + d / 2
                } else {
                    ambiguous += 1;
                    // Truncating division rounds toward `s`.
                    if ambiguous % 2 == 1 { s + d / 2 } else { t - d / 2 }
                };
                Value::Int(i64::try_from(m).expect("between two i64 values"))
            }
            _ => unreachable!("points validated against one schema"),
        })
        .collect();
    Point::new(values)
}

/// Whether `m = midpoint(x, y)` is strictly closer to both ends than they
/// are to each other. Only meaningful when `distance(x, y)` exceeds the
/// schema's minimal separation.
pub fn contraction_check(schema: &SpaceSchema, x: &Point, y: &Point) -> Result<bool, MorphError> {
    check_point(schema, x)?;
    check_point(schema, y)?;
    let d = distance_unchecked(x, y);
    let floor = min_separation(schema);
    if d <= floor {
        return Err(MorphError::Inapplicable { distance: d, min_separation: floor });
    }
    let m = midpoint_unchecked(x, y);
    Ok(distance_unchecked(x, &m) < d && distance_unchecked(y, &m) < d)
}
