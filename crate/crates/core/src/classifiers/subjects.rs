//! The ten built-in 2D subject classifiers.
//!
//! All share the domain `[0, 2π] × [-1, 1]` with step 0.2 on both axes.
//! Geometry constants have defaults and can be overridden by name.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::space::{random_point, FeatureDescriptor, FeatureKind, Point, SpaceSchema};

use super::{Classifier, Executor, ExecError, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubjectId {
    Box1,
    Box2,
    Circle1,
    Circle2,
    Line1,
    Line2,
    Triangle1,
    Triangle2,
    Sin1,
    Sin2,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SubjectError {
    #[error("unknown subject {0:?}")]
    Unknown(String),
    #[error("subject {subject} has no parameter {param:?} (known: {known})")]
    UnknownParam { subject: SubjectId, param: String, known: String },
    #[error("parameter {param:?} must be finite")]
    BadValue { param: String },
}

impl SubjectId {
    pub const ALL: [SubjectId; 10] = [
        SubjectId::Box1,
        SubjectId::Box2,
        SubjectId::Circle1,
        SubjectId::Circle2,
        SubjectId::Line1,
        SubjectId::Line2,
        SubjectId::Triangle1,
        SubjectId::Triangle2,
        SubjectId::Sin1,
        SubjectId::Sin2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubjectId::Box1 => "box1",
            SubjectId::Box2 => "box2",
            SubjectId::Circle1 => "circle1",
            SubjectId::Circle2 => "circle2",
            SubjectId::Line1 => "line1",
            SubjectId::Line2 => "line2",
            SubjectId::Triangle1 => "triangle1",
            SubjectId::Triangle2 => "triangle2",
            SubjectId::Sin1 => "sin1",
            SubjectId::Sin2 => "sin2",
        }
    }

    /// Every label the subject can return, in a fixed order.
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            SubjectId::Box1 | SubjectId::Circle1 | SubjectId::Triangle1 | SubjectId::Triangle2 => {
                &["inside", "outside"]
            }
            SubjectId::Box2 => &["dark", "light"],
            SubjectId::Circle2 => &["inner", "ring", "outside"],
            SubjectId::Line1 | SubjectId::Sin1 => &["above", "below"],
            SubjectId::Line2 => &["above", "between", "below"],
            SubjectId::Sin2 => &["blue", "black", "red"],
        }
    }

    /// Default geometry constants.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            SubjectId::Box1 => &[("x0", FRAC_PI_2), ("x1", 3.0 * FRAC_PI_2), ("y0", -0.5), ("y1", 0.5)],
            SubjectId::Box2 => &[("cx", PI), ("cy", 0.0)],
            SubjectId::Circle1 => &[("cx", PI), ("cy", 0.0), ("r", 0.7)],
            SubjectId::Circle2 => &[("cx", PI), ("cy", 0.0), ("r_inner", 0.4), ("r_outer", 0.8)],
            SubjectId::Line1 => &[("slope", 0.3), ("x0", PI), ("y0", 0.0)],
            SubjectId::Line2 => &[("slope", 0.3), ("x0", PI), ("y0", 0.0), ("half_width", 0.4)],
            SubjectId::Triangle1 => &[("cx", PI), ("top", 0.6), ("bottom", -0.4), ("half_base", 0.8)],
            SubjectId::Triangle2 => &[
                ("cx1", FRAC_PI_2),
                ("cx2", 3.0 * FRAC_PI_2),
                ("top", 0.6),
                ("bottom", -0.4),
                ("half_base", 0.8),
            ],
            SubjectId::Sin1 => &[("amplitude", 1.0)],
            SubjectId::Sin2 => &[("amplitude", 1.0), ("band", 0.3)],
        }
    }
}

impl fmt::Display for SubjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubjectId {
    type Err = SubjectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubjectId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| SubjectError::Unknown(s.to_string()))
    }
}

/// Shared schema of the subjects: `x ∈ [0, 2π]`, `y ∈ [-1, 1]`, step 0.2.
pub fn subject_schema() -> SpaceSchema {
    SpaceSchema::new(vec![
        FeatureDescriptor::new("x", FeatureKind::real(0.0, TAU, 0.2)),
        FeatureDescriptor::new("y", FeatureKind::real(-1.0, 1.0, 0.2)),
    ])
    .expect("static schema is valid")
}

#[derive(Debug, Clone)]
pub struct Subject {
    id: SubjectId,
    params: Vec<f64>,
    labels: Vec<Label>,
    schema: SpaceSchema,
}

impl Subject {
    pub fn new(id: SubjectId, overrides: &[(String, f64)]) -> Result<Self, SubjectError> {
        let defaults = id.defaults();
        let mut params: Vec<f64> = defaults.iter().map(|(_, v)| *v).collect();
        for (key, value) in overrides {
            let slot = defaults.iter().position(|(k, _)| k == key).ok_or_else(|| SubjectError::UnknownParam {
                subject: id,
                param: key.clone(),
                known: defaults.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", "),
            })?;
            if !value.is_finite() {
                return Err(SubjectError::BadValue { param: key.clone() });
            }
            params[slot] = *value;
        }
        Ok(Subject {
            id,
            params,
            labels: id.labels().iter().map(|l| Label::new(l)).collect(),
            schema: subject_schema(),
        })
    }

    pub fn id(&self) -> SubjectId {
        self.id
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        let i = self.id.defaults().iter().position(|(k, _)| *k == name)?;
        Some(self.params[i])
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Label at `(x, y)`.
    pub fn label_at(&self, x: f64, y: f64) -> &Label {
        &self.labels[self.region(x, y)]
    }

    fn region(&self, x: f64, y: f64) -> usize {
        let p = &self.params;
        match self.id {
            SubjectId::Box1 => usize::from(!(p[0] <= x && x <= p[1] && p[2] <= y && y <= p[3])),
            SubjectId::Box2 => usize::from((x < p[0]) != (y < p[1])),
            SubjectId::Circle1 => usize::from((x - p[0]).hypot(y - p[1]) > p[2]),
            SubjectId::Circle2 => {
                let r = (x - p[0]).hypot(y - p[1]);
                if r <= p[2] {
                    0
                } else if r <= p[3] {
                    1
                } else {
                    2
                }
            }
            SubjectId::Line1 => usize::from(y <= p[0] * (x - p[1]) + p[2]),
            SubjectId::Line2 => {
                let line = p[0] * (x - p[1]) + p[2];
                if y > line + p[3] {
                    0
                } else if y >= line - p[3] {
                    1
                } else {
                    2
                }
            }
            SubjectId::Triangle1 => usize::from(!in_triangle(x, y, p[0], p[1], p[2], p[3])),
            SubjectId::Triangle2 => {
                let inside = in_triangle(x, y, p[0], p[2], p[3], p[4]) || in_triangle(x, y, p[1], p[2], p[3], p[4]);
                usize::from(!inside)
            }
            SubjectId::Sin1 => usize::from(y <= p[0] * x.sin()),
            SubjectId::Sin2 => {
                let s = p[0] * x.sin();
                if y > s + p[1] {
                    0
                } else if y >= s - p[1] {
                    1
                } else {
                    2
                }
            }
        }
    }
}

/// Isosceles triangle with apex `(cx, top)` and base from
/// `(cx - half_base, bottom)` to `(cx + half_base, bottom)`.
fn in_triangle(x: f64, y: f64, cx: f64, top: f64, bottom: f64, half_base: f64) -> bool {
    if y < bottom || y > top {
        return false;
    }
    (x - cx).abs() <= half_base * (top - y) / (top - bottom)
}

impl Classifier for Subject {
    fn schema(&self) -> &SpaceSchema {
        &self.schema
    }

    fn classify(&self, p: &Point) -> Result<Label, ExecError> {
        let x = p[0].as_f64().expect("validated real");
        let y = p[1].as_f64().expect("validated real");
        Ok(self.label_at(x, y).clone())
    }

    fn labels(&self) -> Option<Vec<Label>> {
        Some(self.labels.clone())
    }

    fn name(&self) -> &str {
        self.id.as_str()
    }
}

/// Executor over a built-in subject. `overrides` are `(param, value)` pairs.
pub fn make_subject(name: &str, overrides: &[(String, f64)]) -> Result<Executor, SubjectError> {
    let id: SubjectId = name.parse()?;
    Ok(Executor::new(Box::new(Subject::new(id, overrides)?)))
}

/// Monte Carlo estimate of each label's probability mass under uniform
/// sampling of the subject's domain. Every label appears, possibly with 0.
pub fn class_mass<R: Rng + ?Sized>(subject: &Subject, samples: usize, rng: &mut R) -> BTreeMap<Label, f64> {
    let mut counts = vec![0usize; subject.labels.len()];
    for _ in 0..samples {
        let p = random_point(&subject.schema, rng).expect("subject schema is bounded");
        let (x, y) = (p[0].as_f64().expect("real"), p[1].as_f64().expect("real"));
        counts[subject.region(x, y)] += 1;
    }
    subject
        .labels
        .iter()
        .zip(counts)
        .map(|(l, c)| (l.clone(), c as f64 / samples.max(1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn subject(name: &str) -> Subject {
        Subject::new(name.parse().unwrap(), &[]).unwrap()
    }

    fn classify(e: &Executor, x: f64, y: f64) -> String {
        e.classify(&Point::reals(&[x, y]).unwrap()).unwrap().to_string()
    }

    #[test]
    fn sin2_bands() {
        let e = make_subject("sin2", &[]).unwrap();
        // sin(π) ≈ 0: 0.9 is above the upper band edge 0.3, 0.0 inside.
        assert_eq!(classify(&e, PI, 0.9), "blue");
        assert_eq!(classify(&e, PI, 0.0), "black");
        assert_eq!(classify(&e, FRAC_PI_2, 0.0), "red");
    }

    #[test]
    fn box1_corner_is_outside() {
        let e = make_subject("box1", &[]).unwrap();
        assert_eq!(classify(&e, 0.1, -0.9), "outside");
        assert_eq!(classify(&e, PI, 0.0), "inside");
    }

    #[test]
    fn circle1_center_is_inside() {
        let e = make_subject("circle1", &[]).unwrap();
        assert_eq!(classify(&e, PI, 0.0), "inside");
    }

    #[test]
    fn line1_sides_differ() {
        let e = make_subject("line1", &[]).unwrap();
        // Line passes through (π, 0) with slope 0.3.
        assert_eq!(classify(&e, PI, 0.5), "above");
        assert_eq!(classify(&e, PI, -0.5), "below");
        // At x = 5 the line sits at 0.3 * (5 - π) ≈ 0.557.
        assert_eq!(classify(&e, 5.0, 0.6), "above");
        assert_eq!(classify(&e, 5.0, 0.5), "below");
    }

    #[test]
    fn every_subject_reaches_every_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in SubjectId::ALL {
            let s = Subject::new(id, &[]).unwrap();
            let mass = class_mass(&s, 20_000, &mut rng);
            assert_eq!(mass.len(), id.labels().len());
            for (label, m) in &mass {
                assert!(*m > 0.0, "{id}: {label} never seen");
            }
            let total: f64 = mass.values().sum();
            assert!((total - 1.0).abs() < 1e-9, "{id}: {total}");
        }
    }

    #[test]
    fn box1_mass_matches_area() {
        let s = subject("box1");
        let n = 200_000;
        let mass = class_mass(&s, n, &mut ChaCha8Rng::seed_from_u64(2));
        // Rectangle π × 1 inside a 2π × 2 domain.
        let p = 0.25;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((mass[&Label::new("inside")] - p).abs() < 3.0 * se);
    }

    #[test]
    fn overrides_apply_and_are_checked() {
        let s = Subject::new(SubjectId::Circle1, &[("r".into(), 0.1)]).unwrap();
        assert_eq!(s.param("r"), Some(0.1));
        assert_eq!(s.label_at(PI + 0.5, 0.0).as_str(), "outside");
        assert!(matches!(
            Subject::new(SubjectId::Circle1, &[("radius".into(), 0.1)]),
            Err(SubjectError::UnknownParam { .. })
        ));
        assert!(matches!(
            Subject::new(SubjectId::Circle1, &[("r".into(), f64::NAN)]),
            Err(SubjectError::BadValue { .. })
        ));
        assert!(matches!(make_subject("hexagon", &[]), Err(SubjectError::Unknown(_))));
    }

    #[test]
    fn names_round_trip() {
        for id in SubjectId::ALL {
            assert_eq!(id.as_str().parse::<SubjectId>().unwrap(), id);
        }
    }
}
