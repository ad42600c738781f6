use std::fmt;
use std::str::FromStr;

use crate::space::{FeatureKind, Point, SpaceSchema, Value};

use super::{check_point, MorphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// Steps feature `feature` one unit up or down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Traversal {
    pub feature: usize,
    pub direction: Direction,
}

impl Traversal {
    pub fn up(feature: usize) -> Self {
        Traversal { feature, direction: Direction::Up }
    }

    pub fn down(feature: usize) -> Self {
        Traversal { feature, direction: Direction::Down }
    }

    /// The complete traversal set: up and down for every feature.
    pub fn all(schema: &SpaceSchema) -> Vec<Traversal> {
        (0..schema.len()).flat_map(|i| [Traversal::up(i), Traversal::down(i)]).collect()
    }
}

impl fmt::Display for Traversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Up => 'U',
            Direction::Down => 'D',
        };
        write!(f, "{d}{}", self.feature)
    }
}

impl FromStr for Traversal {
    type Err = MorphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MorphError::Parse(format!("bad traversal {s:?}, expected U<i> or D<i>"));
        let mut chars = s.chars();
        let direction = match chars.next() {
            Some('U') => Direction::Up,
            Some('D') => Direction::Down,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let feature = rest.parse().map_err(|_| bad())?;
        Ok(Traversal { feature, direction })
    }
}

pub fn apply_traversal(schema: &SpaceSchema, t: Traversal, x: &Point) -> Result<Point, MorphError> {
    check_point(schema, x)?;
    if t.feature >= schema.len() {
        return Err(MorphError::NoSuchFeature { index: t.feature, len: schema.len() });
    }
    Ok(apply_traversal_unchecked(schema, t, x))
}

/// Traversal on a point known to be valid. Saturates at domain bounds.
pub(crate) fn apply_traversal_unchecked(schema: &SpaceSchema, t: Traversal, x: &Point) -> Point {
    let mut out = x.clone();
    let i = t.feature;
    let up = t.direction == Direction::Up;
    let feature = schema.feature(i);
    let next = match (&feature.kind, &x[i]) {
        (FeatureKind::Categorical { values }, Value::Symbol(s)) => {
            let j = values.iter().position(|v| v == s).expect("valid categorical value");
            let k = if up { (j + 1).min(values.len() - 1) } else { j.saturating_sub(1) };
            Value::Symbol(values[k].clone())
        }
        (kind @ (FeatureKind::Integer { .. } | FeatureKind::Natural { .. }), Value::Int(v)) => {
            let (min, max) = kind.int_bounds().unwrap_or_default();
            let n = if up {
                v.saturating_add(1).min(max.unwrap_or(i64::MAX))
            } else {
                v.saturating_sub(1).max(min.unwrap_or(i64::MIN))
            };
            Value::Int(n)
        }
        (FeatureKind::Real { .. }, Value::Real(v)) => {
            let range = schema.real_range(i).expect("real feature has a range");
            // In-range values keep sums and differences inside i128.
            let n = if up {
                v.checked_add(range.step).expect("in range").min(range.hi)
            } else {
                v.checked_sub(range.step).expect("in range").max(range.lo)
            };
            Value::Real(n)
        }
        _ => unreachable!("point validated against schema"),
    };
    out.values_mut()[i] = next;
    out
}
