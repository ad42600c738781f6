use std::fmt;

use crate::space::{FeatureKind, Point, SpaceSchema, Value};

use super::midpoint::midpoint_unchecked;
use super::traversal::{apply_traversal_unchecked, Direction, Traversal};
use super::{check_point, MorphError};

/// Longest path `plan_path` will build.
pub const MAX_PATH_LEN: usize = 1_000_000;

/// Smallest real tolerance `plan_path` accepts. Well above the fixed-point
/// quantum, so repeated halving can always get there.
pub const MIN_DELTA: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Traverse(Traversal),
    /// Replace the current point `p` with `midpoint(target, p)`.
    MidTowardTarget(Point),
}

/// Ordered list of datamorphism applications. Empty is the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Composition {
    pub steps: Vec<Step>,
}

impl Composition {
    pub fn new(steps: Vec<Step>) -> Self {
        Composition { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses the text form, e.g. `U0 U0 D3 M`. Every `M` moves toward
    /// `target`, which is required if any `M` appears.
    pub fn parse(text: &str, target: Option<&Point>) -> Result<Self, MorphError> {
        let steps = text
            .split_whitespace()
            .map(|tok| match tok {
                "M" => target
                    .cloned()
                    .map(Step::MidTowardTarget)
                    .ok_or_else(|| MorphError::Parse("`M` step needs a target point".into())),
                _ => tok.parse().map(Step::Traverse),
            })
            .collect::<Result<_, _>>()?;
        Ok(Composition { steps })
    }
}

/// Text form: space-separated `U<i>`, `D<i>` and `M` tokens.
impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match step {
                Step::Traverse(t) => write!(f, "{t}")?,
                Step::MidTowardTarget(_) => f.write_str("M")?,
            }
        }
        Ok(())
    }
}

pub fn apply_composition(schema: &SpaceSchema, c: &Composition, start: &Point) -> Result<Point, MorphError> {
    check_point(schema, start)?;
    for step in &c.steps {
        match step {
            Step::Traverse(t) if t.feature >= schema.len() => {
                return Err(MorphError::NoSuchFeature { index: t.feature, len: schema.len() })
            }
            Step::MidTowardTarget(target) => check_point(schema, target)?,
            _ => {}
        }
    }
    Ok(apply_composition_unchecked(schema, c, start))
}

pub(crate) fn apply_composition_unchecked(schema: &SpaceSchema, c: &Composition, start: &Point) -> Point {
    c.steps.iter().fold(start.clone(), |p, step| match step {
        Step::Traverse(t) => apply_traversal_unchecked(schema, *t, &p),
        Step::MidTowardTarget(target) => midpoint_unchecked(target, &p),
    })
}

/// Builds a composition carrying `a` onto `b`: exactly for schemas without
/// real features, within `delta` otherwise.
///
/// Each coordinate first walks toward `b` by whole steps; for real features
/// that is `floor(|b_i - a_i| / c_i)` steps, leaving a residual below `c_i`.
/// The real residual is then closed by `ceil(log2(c / delta))` midpoints
/// toward `b`, where `c` is the Euclidean norm of the real steps.
pub fn plan_path(schema: &SpaceSchema, a: &Point, b: &Point, delta: f64) -> Result<Composition, MorphError> {
    check_point(schema, a)?;
    check_point(schema, b)?;
    let has_real = schema.has_real();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if delta.is_nan() || delta < 0.0 || (has_real && !(delta >= MIN_DELTA)) {
        return Err(MorphError::BadTolerance { delta, has_real });
    }

    let mut steps = Vec::new();
    let mut push = |t: Traversal, n: u128| -> Result<(), MorphError> {
        if n > (MAX_PATH_LEN - steps.len()) as u128 {
            return Err(MorphError::PathTooLong { limit: MAX_PATH_LEN });
        }
        steps.extend(std::iter::repeat(Step::Traverse(t)).take(n as usize));
        Ok(())
    };
    let mut step_norm_sq = 0.0f64;
    for (i, feature) in schema.features().iter().enumerate() {
        let (forward, n) = match (&feature.kind, &a[i], &b[i]) {
            (FeatureKind::Categorical { values }, Value::Symbol(s), Value::Symbol(t)) => {
                let ia = values.iter().position(|v| v == s).expect("valid value");
                let ib = values.iter().position(|v| v == t).expect("valid value");
                (ib >= ia, ia.abs_diff(ib) as u128)
            }
            (_, Value::Int(s), Value::Int(t)) => (t >= s, (i128::from(*t) - i128::from(*s)).unsigned_abs()),
            (FeatureKind::Real { .. }, Value::Real(s), Value::Real(t)) => {
                let range = schema.real_range(i).expect("real feature has a range");
                let c = range.step.to_f64();
                step_norm_sq += c * c;
                (t >= s, s.whole_steps_between(*t, range.step))
            }
            _ => unreachable!("points validated against schema"),
        };
        let t = Traversal {
            feature: i,
            direction: if forward { Direction::Up } else { Direction::Down },
        };
        push(t, n)?;
    }

    if has_real {
        let mut width = step_norm_sq.sqrt();
        while width > delta {
            width /= 2.0;
            steps.push(Step::MidTowardTarget(b.clone()));
        }
    }
    Ok(Composition { steps })
}
