use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::real::Real;
use super::schema::{FeatureKind, SpaceSchema};
use super::SpaceError;

/// One coordinate of a test case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Symbol(Arc<str>),
    Int(i64),
    Real(Real),
}

impl Value {
    pub fn symbol(s: &str) -> Self {
        Value::Symbol(Arc::from(s))
    }

    pub fn real(v: f64) -> Result<Self, SpaceError> {
        Ok(Value::Real(Real::new(v).map_err(|e| SpaceError::Value(e.to_string()))?))
    }

    pub fn as_real(&self) -> Option<Real> {
        match self {
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(r.to_f64()),
            Value::Int(i) => Some(*i as f64),
            Value::Symbol(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Symbol(s) => serde_json::Value::String(s.to_string()),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Real(r) => serde_json::Value::from(r.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Symbol(s) => f.write_str(s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Symbol(s) => serializer.serialize_str(s),
            Value::Int(i) => serializer.serialize_i64(*i),
            Value::Real(r) => serializer.serialize_f64(r.to_f64()),
        }
    }
}

/// A test case: one value per feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(Vec<Value>);

impl Point {
    pub fn new(values: Vec<Value>) -> Self {
        Point(values)
    }

    /// All-real point. Fails on non-finite or out-of-range coordinates.
    pub fn reals(coords: &[f64]) -> Result<Self, SpaceError> {
        coords.iter().map(|&v| Value::real(v)).collect::<Result<Vec<_>, _>>().map(Point)
    }

    pub fn ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&v| Value::Int(v)).collect())
    }

    pub fn symbols(coords: &[&str]) -> Self {
        Point(coords.iter().map(|s| Value::symbol(s)).collect())
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Value] {
        &mut self.0
    }

    /// Coordinates as `f64`; `None` if any coordinate is categorical.
    pub fn to_f64s(&self) -> Option<Vec<f64>> {
        self.0.iter().map(Value::as_f64).collect()
    }

    /// Parses a JSON array, reading each element by its feature's kind.
    /// Real features accept any JSON number; integer features require an
    /// integral number; categorical features require a string.
    pub fn from_json(schema: &SpaceSchema, json: &serde_json::Value) -> Result<Self, SpaceError> {
        let items = json
            .as_array()
            .ok_or_else(|| SpaceError::Json("point must be a JSON array".into()))?;
        if items.len() != schema.len() {
            return Err(SpaceError::Json(format!(
                "point has {} values, schema has {} features",
                items.len(),
                schema.len()
            )));
        }
        let values = items
            .iter()
            .zip(schema.features())
            .enumerate()
            .map(|(i, (item, feature))| {
                let bad = |what: &str| SpaceError::Json(format!("feature {i} ({}): expected {what}", feature.name));
                match feature.kind {
                    FeatureKind::Categorical { .. } => {
                        item.as_str().map(Value::symbol).ok_or_else(|| bad("a string"))
                    }
                    FeatureKind::Integer { .. } | FeatureKind::Natural { .. } => {
                        item.as_i64().map(Value::Int).ok_or_else(|| bad("an integer"))
                    }
                    FeatureKind::Real { .. } => {
                        let v = item.as_f64().ok_or_else(|| bad("a number"))?;
                        Value::real(v)
                    }
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Point(values))
    }

    pub fn parse_json(schema: &SpaceSchema, text: &str) -> Result<Self, SpaceError> {
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SpaceError::Json(e.to_string()))?;
        Point::from_json(schema, &json)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(Value::to_json).collect())
    }
}

impl Index<usize> for Point {
    type Output = Value;

    fn index(&self, i: usize) -> &Value {
        &self.0[i]
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for v in &self.0 {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(">")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationReason {
    WrongArity { expected: usize, found: usize },
    KindMismatch { expected: &'static str },
    NotAMember(String),
    BelowMin { value: i64, min: i64 },
    AboveMax { value: i64, max: i64 },
    OutOfRange { value: f64, lo: f64, hi: f64 },
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationReason::WrongArity { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            ViolationReason::KindMismatch { expected } => write!(f, "expected a {expected} value"),
            ViolationReason::NotAMember(s) => write!(f, "{s:?} is not a declared value"),
            ViolationReason::BelowMin { value, min } => write!(f, "{value} < min {min}"),
            ViolationReason::AboveMax { value, max } => write!(f, "{value} > max {max}"),
            ViolationReason::OutOfRange { value, lo, hi } => {
                write!(f, "{value} outside [{lo}, {hi}]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Offending feature index; `None` for arity violations.
    pub feature: Option<usize>,
    pub reason: ViolationReason,
}

/// Outcome of [`validate_point`]: empty means the point is valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violating_features(&self) -> Vec<usize> {
        self.violations.iter().filter_map(|v| v.feature).collect()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match v.feature {
                Some(idx) => write!(f, "feature {idx}: {}", v.reason)?,
                None => write!(f, "{}", v.reason)?,
            }
        }
        Ok(())
    }
}

pub fn validate_point(schema: &SpaceSchema, p: &Point) -> Verdict {
    let mut violations = Vec::new();
    if p.len() != schema.len() {
        violations.push(Violation {
            feature: None,
            reason: ViolationReason::WrongArity {
                expected: schema.len(),
                found: p.len(),
            },
        });
    }
    for (i, (value, feature)) in p.values().iter().zip(schema.features()).enumerate() {
        let reason = match (&feature.kind, value) {
            (FeatureKind::Categorical { values }, Value::Symbol(s)) => {
                (!values.contains(s)).then(|| ViolationReason::NotAMember(s.to_string()))
            }
            (FeatureKind::Categorical { .. }, _) => Some(ViolationReason::KindMismatch {
                expected: "categorical",
            }),
            (kind @ (FeatureKind::Integer { .. } | FeatureKind::Natural { .. }), Value::Int(v)) => {
                let (min, max) = kind.int_bounds().unwrap_or_default();
                match (min, max) {
                    (Some(min), _) if *v < min => Some(ViolationReason::BelowMin { value: *v, min }),
                    (_, Some(max)) if *v > max => Some(ViolationReason::AboveMax { value: *v, max }),
                    _ => None,
                }
            }
            (FeatureKind::Integer { .. } | FeatureKind::Natural { .. }, _) => {
                Some(ViolationReason::KindMismatch { expected: "integer" })
            }
            (FeatureKind::Real { lo, hi, .. }, Value::Real(r)) => {
                let range = schema.real_range(i).expect("real feature has a range");
                (*r < range.lo || *r > range.hi).then(|| ViolationReason::OutOfRange {
                    value: r.to_f64(),
                    lo: *lo,
                    hi: *hi,
                })
            }
            (FeatureKind::Real { .. }, _) => Some(ViolationReason::KindMismatch { expected: "real" }),
        };
        if let Some(reason) = reason {
            violations.push(Violation {
                feature: Some(i),
                reason,
            });
        }
    }
    Verdict { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FeatureDescriptor;
    use std::f64::consts::TAU;

    fn running_example() -> SpaceSchema {
        SpaceSchema::new(vec![
            FeatureDescriptor::new("x", FeatureKind::real(0.0, TAU, 0.2)),
            FeatureDescriptor::new("y", FeatureKind::real(-1.0, 1.0, 0.2)),
        ])
        .unwrap()
    }

    #[test]
    fn in_range_point_is_ok() {
        let v = validate_point(&running_example(), &Point::reals(&[3.0, 0.0]).unwrap());
        assert!(v.is_ok(), "{v}");
    }

    #[test]
    fn out_of_range_real_is_flagged() {
        let v = validate_point(&running_example(), &Point::reals(&[7.0, 0.0]).unwrap());
        assert_eq!(v.violating_features(), vec![0]);
        assert!(matches!(v.violations[0].reason, ViolationReason::OutOfRange { .. }));
    }

    #[test]
    fn non_member_symbol_is_flagged() {
        let schema = SpaceSchema::new(vec![FeatureDescriptor::new(
            "c",
            FeatureKind::categorical(["a", "b", "c"]),
        )])
        .unwrap();
        let v = validate_point(&schema, &Point::symbols(&["d"]));
        assert_eq!(v.violating_features(), vec![0]);
        assert_eq!(v.violations[0].reason, ViolationReason::NotAMember("d".into()));
    }

    #[test]
    fn arity_kind_and_bounds() {
        let schema = SpaceSchema::new(vec![
            FeatureDescriptor::new("n", FeatureKind::natural(Some(3))),
            FeatureDescriptor::new("i", FeatureKind::integer(Some(-2), None)),
        ])
        .unwrap();
        assert!(validate_point(&schema, &Point::ints(&[0, 100])).is_ok());
        assert_eq!(validate_point(&schema, &Point::ints(&[-1, -3])).violating_features(), vec![0, 1]);
        assert_eq!(validate_point(&schema, &Point::ints(&[4, 0])).violating_features(), vec![0]);
        let v = validate_point(&schema, &Point::ints(&[1]));
        assert_eq!(v.violations[0].feature, None);
        let v = validate_point(&schema, &Point::new(vec![Value::symbol("a"), Value::Int(0)]));
        assert_eq!(v.violations[0].reason, ViolationReason::KindMismatch { expected: "integer" });
    }

    #[test]
    fn json_points_follow_schema_kinds() {
        let schema = SpaceSchema::new(vec![
            FeatureDescriptor::new("c", FeatureKind::categorical(["a", "b"])),
            FeatureDescriptor::new("n", FeatureKind::integer(None, None)),
            FeatureDescriptor::new("r", FeatureKind::real(0.0, 10.0, 0.5)),
        ])
        .unwrap();
        let p = Point::parse_json(&schema, r#"["b", 5, 3]"#).unwrap();
        assert_eq!(p[2], Value::real(3.0).unwrap());
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"["b",5,3.0]"#);
        assert!(Point::parse_json(&schema, r#"["b", 5.5, 3]"#).is_err());
        assert!(Point::parse_json(&schema, r#"["b", 5]"#).is_err());
        assert!(Point::parse_json(&schema, r#"[1, 5, 3]"#).is_err());
    }
}
