use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::real::Real;
use super::SpaceError;

/// Domain of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    /// Finite ordered symbol set. The declared order defines up/down.
    Categorical { values: Vec<Arc<str>> },
    Integer {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<i64>,
    },
    /// Non-negative integers, optionally capped.
    Natural {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<i64>,
    },
    /// Bounded continuous range `[lo, hi]` traversed in increments of `step`.
    Real { lo: f64, hi: f64, step: f64 },
}

impl FeatureKind {
    pub fn categorical<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Arc<str>>,
    {
        FeatureKind::Categorical {
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn integer(min: Option<i64>, max: Option<i64>) -> Self {
        FeatureKind::Integer { min, max }
    }

    pub fn natural(max: Option<i64>) -> Self {
        FeatureKind::Natural { max }
    }

    pub fn real(lo: f64, hi: f64, step: f64) -> Self {
        FeatureKind::Real { lo, hi, step }
    }

    /// Wire name used in schema files and the bridge handshake.
    pub fn tag(&self) -> &'static str {
        match self {
            FeatureKind::Categorical { .. } => "categorical",
            FeatureKind::Integer { .. } => "integer",
            FeatureKind::Natural { .. } => "natural",
            FeatureKind::Real { .. } => "real",
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, FeatureKind::Real { .. })
    }

    /// Inclusive integer bounds; `None` on a side means unbounded.
    pub(crate) fn int_bounds(&self) -> Option<(Option<i64>, Option<i64>)> {
        match *self {
            FeatureKind::Integer { min, max } => Some((min, max)),
            FeatureKind::Natural { max } => Some((Some(0), max)),
            _ => None,
        }
    }
}

/// Fixed-point view of a real feature's range and step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealRange {
    pub lo: Real,
    pub hi: Real,
    pub step: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureDescriptor {
    pub fn new(name: impl Into<String>, kind: FeatureKind) -> Self {
        FeatureDescriptor {
            name: name.into(),
            kind,
        }
    }

    fn check(&self) -> Result<Option<RealRange>, String> {
        if self.name.is_empty() {
            return Err("empty feature name".into());
        }
        match &self.kind {
            FeatureKind::Categorical { values } => {
                if values.is_empty() {
                    return Err("categorical value list is empty".into());
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v) {
                        return Err(format!("duplicate categorical value {v:?}"));
                    }
                }
                Ok(None)
            }
            FeatureKind::Integer { min, max } => match (min, max) {
                (Some(lo), Some(hi)) if lo > hi => Err(format!("min {lo} > max {hi}")),
                _ => Ok(None),
            },
            FeatureKind::Natural { max } => match max {
                Some(m) if *m < 0 => Err(format!("natural max {m} is negative")),
                _ => Ok(None),
            },
            &FeatureKind::Real { lo, hi, step } => {
                let lo_r = Real::new(lo).map_err(|e| format!("lo: {e}"))?;
                let hi_r = Real::new(hi).map_err(|e| format!("hi: {e}"))?;
                let step_r = Real::new(step).map_err(|e| format!("step: {e}"))?;
                if lo_r >= hi_r {
                    return Err(format!("lo {lo} must be below hi {hi}"));
                }
                if step_r <= Real::ZERO || step > hi - lo {
                    return Err(format!("step {step} must lie in (0, hi - lo]"));
                }
                Ok(Some(RealRange {
                    lo: lo_r,
                    hi: hi_r,
                    step: step_r,
                }))
            }
        }
    }
}

/// Classification of a data space by the kinds of its features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    DiscreteNonNumerical,
    DiscreteNumerical,
    ContinuousNumerical,
    Hybrid,
}

impl fmt::Display for SchemaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemaKind::DiscreteNonNumerical => "discrete-non-numerical",
            SchemaKind::DiscreteNumerical => "discrete-numerical",
            SchemaKind::ContinuousNumerical => "continuous-numerical",
            SchemaKind::Hybrid => "hybrid",
        })
    }
}

#[derive(Deserialize, Serialize)]
struct SchemaDoc {
    features: Vec<FeatureDescriptor>,
}

/// Ordered feature list defining the data space `D = D_1 x ... x D_K`.
///
/// Immutable once built; construction validates every descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct SpaceSchema {
    features: Vec<FeatureDescriptor>,
    #[serde(skip)]
    reals: Vec<Option<RealRange>>,
}

impl TryFrom<SchemaDoc> for SpaceSchema {
    type Error = SpaceError;

    fn try_from(doc: SchemaDoc) -> Result<Self, Self::Error> {
        SpaceSchema::new(doc.features)
    }
}

impl From<SpaceSchema> for SchemaDoc {
    fn from(s: SpaceSchema) -> Self {
        SchemaDoc {
            features: s.features,
        }
    }
}

impl SpaceSchema {
    pub fn new(features: Vec<FeatureDescriptor>) -> Result<Self, SpaceError> {
        if features.is_empty() {
            return Err(SpaceError::InvalidSchema("schema has no features".into()));
        }
        let mut names = HashSet::new();
        let mut reals = Vec::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if !names.insert(f.name.as_str()) {
                return Err(SpaceError::InvalidSchema(format!(
                    "feature {i}: duplicate name {:?}",
                    f.name
                )));
            }
            let range = f
                .check()
                .map_err(|msg| SpaceError::InvalidSchema(format!("feature {i} ({}): {msg}", f.name)))?;
            reals.push(range);
        }
        Ok(SpaceSchema { features, reals })
    }

    /// Schema of `k` unnamed real features sharing one range; names are `x0..`.
    pub fn uniform_reals(k: usize, lo: f64, hi: f64, step: f64) -> Result<Self, SpaceError> {
        SpaceSchema::new(
            (0..k)
                .map(|i| FeatureDescriptor::new(format!("x{i}"), FeatureKind::real(lo, hi, step)))
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, SpaceError> {
        serde_json::from_str(text).map_err(|e| SpaceError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serialization is infallible")
    }

    pub fn load(path: &Path) -> Result<Self, SpaceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpaceError::Io(format!("{}: {e}", path.display())))?;
        SpaceSchema::from_json(&text)
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn feature(&self, i: usize) -> &FeatureDescriptor {
        &self.features[i]
    }

    /// Number of features, `K`.
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub(crate) fn real_range(&self, i: usize) -> Option<RealRange> {
        self.reals[i]
    }

    pub fn has_real(&self) -> bool {
        self.reals.iter().any(Option::is_some)
    }

    pub fn real_count(&self) -> usize {
        self.reals.iter().filter(|r| r.is_some()).count()
    }

    pub fn kind(&self) -> SchemaKind {
        let mut cat = false;
        let mut int = false;
        let mut real = false;
        for f in &self.features {
            match f.kind {
                FeatureKind::Categorical { .. } => cat = true,
                FeatureKind::Integer { .. } | FeatureKind::Natural { .. } => int = true,
                FeatureKind::Real { .. } => real = true,
            }
        }
        match (cat, int, real) {
            (true, false, false) => SchemaKind::DiscreteNonNumerical,
            (false, true, false) => SchemaKind::DiscreteNumerical,
            (false, false, true) => SchemaKind::ContinuousNumerical,
            _ => SchemaKind::Hybrid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_is_derived_from_features() {
        let cat = FeatureDescriptor::new("c", FeatureKind::categorical(["a", "b"]));
        let int = FeatureDescriptor::new("n", FeatureKind::integer(Some(0), Some(9)));
        let nat = FeatureDescriptor::new("k", FeatureKind::natural(None));
        let real = FeatureDescriptor::new("r", FeatureKind::real(0.0, 1.0, 0.1));

        let k = |fs: Vec<FeatureDescriptor>| SpaceSchema::new(fs).unwrap().kind();
        assert_eq!(k(vec![cat.clone()]), SchemaKind::DiscreteNonNumerical);
        assert_eq!(k(vec![int.clone(), nat.clone()]), SchemaKind::DiscreteNumerical);
        assert_eq!(k(vec![real.clone()]), SchemaKind::ContinuousNumerical);
        assert_eq!(k(vec![cat, int, real]), SchemaKind::Hybrid);
    }

    #[test]
    fn rejects_bad_descriptors() {
        let bad = [
            FeatureKind::categorical(Vec::<&str>::new()),
            FeatureKind::categorical(["a", "a"]),
            FeatureKind::integer(Some(3), Some(1)),
            FeatureKind::natural(Some(-1)),
            FeatureKind::real(1.0, 1.0, 0.1),
            FeatureKind::real(0.0, 1.0, 0.0),
            FeatureKind::real(0.0, 1.0, 2.0),
            FeatureKind::real(0.0, f64::INFINITY, 0.1),
        ];
        for kind in bad {
            let r = SpaceSchema::new(vec![FeatureDescriptor::new("f", kind.clone())]);
            assert!(matches!(r, Err(SpaceError::InvalidSchema(_))), "{kind:?} accepted");
        }
        assert!(SpaceSchema::new(vec![]).is_err());
        let dup = vec![
            FeatureDescriptor::new("f", FeatureKind::natural(None)),
            FeatureDescriptor::new("f", FeatureKind::natural(None)),
        ];
        assert!(SpaceSchema::new(dup).is_err());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let text = r#"{
            "features": [
                {"name": "x", "kind": "real", "lo": 0.0, "hi": 6.283185307179586, "step": 0.2},
                {"name": "colour", "kind": "categorical", "values": ["red", "green", "blue"]},
                {"name": "n", "kind": "integer", "min": -5},
                {"name": "k", "kind": "natural", "max": 10}
            ]
        }"#;
        let schema = SpaceSchema::from_json(text).unwrap();
        assert_eq!(schema.len(), 4);
        assert_eq!(schema.kind(), SchemaKind::Hybrid);
        let again = SpaceSchema::from_json(&schema.to_json()).unwrap();
        assert_eq!(again, schema);
        assert_eq!(again.to_json(), schema.to_json());
    }

    #[test]
    fn json_validation_errors_surface() {
        let text = r#"{"features": [{"name": "x", "kind": "real", "lo": 1.0, "hi": 0.0, "step": 0.2}]}"#;
        assert!(matches!(SpaceSchema::from_json(text), Err(SpaceError::Json(_))));
    }
}
