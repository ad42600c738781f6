//! Exact binary fixed-point scalar for continuous features.
//!
//! Continuous coordinates are held as `i128` multiples of 2^-90. Every finite
//! `f64` in range with no bits below 2^-90 converts exactly, sums and
//! differences never round, and halving a bracket is exact until its width
//! reaches the 2^-90 quantum. Refinement therefore contracts a bracket of
//! width `B` to exactly `B / 2^n`, not `B / 2^n` plus accumulated rounding.

use std::cmp::Ordering;
use std::fmt;

/// 2^90 as a float; scaling by it is exact.
const SCALE: f64 = (1u128 << Real::FRAC_BITS) as f64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Real(i128);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RealError {
    #[error("value {0} is not finite")]
    NotFinite(f64),
    #[error("value {0} exceeds the supported magnitude {limit}", limit = Real::LIMIT)]
    OutOfRange(f64),
}

impl Real {
    pub const FRAC_BITS: u32 = 90;
    /// Largest supported magnitude (2^35). Keeps sums and differences of two
    /// in-range values inside `i128`.
    pub const LIMIT: f64 = 34_359_738_368.0;
    pub const ZERO: Real = Real(0);

    pub fn new(value: f64) -> Result<Self, RealError> {
        if !value.is_finite() {
            return Err(RealError::NotFinite(value));
        }
        if value.abs() > Self::LIMIT {
            return Err(RealError::OutOfRange(value));
        }
        // Multiplying by a power of two is exact; rounding only drops bits
        // below the quantum.
        Ok(Real((value * SCALE).round() as i128))
    }

    pub const fn from_raw(raw: i128) -> Self {
        Real(raw)
    }

    pub const fn raw(self) -> i128 {
        self.0
    }

    /// Nearest `f64` (round-to-nearest-even).
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }

    /// Floor of the exact average. Exact whenever the raw sum is even.
    pub fn midpoint(self, other: Real) -> Real {
        Real((self.0 & other.0) + ((self.0 ^ other.0) >> 1))
    }

    /// `|self - other|` rounded once to `f64`.
    pub fn abs_diff_f64(self, other: Real) -> f64 {
        ((self.0 - other.0) as f64 / SCALE).abs()
    }

    pub fn checked_add(self, other: Real) -> Option<Real> {
        self.0.checked_add(other.0).map(Real)
    }

    pub fn checked_sub(self, other: Real) -> Option<Real> {
        self.0.checked_sub(other.0).map(Real)
    }

    /// Number of whole `step`s contained in `|self - other|`.
    pub fn whole_steps_between(self, other: Real, step: Real) -> u128 {
        debug_assert!(step.0 > 0);
        (self.0 - other.0).unsigned_abs() / step.0.unsigned_abs()
    }
}

impl TryFrom<f64> for Real {
    type Error = RealError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Real::new(value)
    }
}

impl From<Real> for f64 {
    fn from(r: Real) -> f64 {
        r.to_f64()
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        Real::new(*other).is_ok_and(|o| o == *self)
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        Real::new(*other).ok().map(|o| self.cmp(&o))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
