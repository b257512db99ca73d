//! Integer resource quantities.
//!
//! Battery charge, fuel, drain and recharge are all stored as integer counts
//! of a fixed quantum so that resource arithmetic during the search is exact
//! and dominance comparisons never suffer from rounding.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A quantized resource amount (battery charge or fuel).
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Units(pub i64);

impl Units {
    pub const ZERO: Units = Units(0);

    pub fn get(self) -> i64 {
        self.0
    }
}

impl Add for Units {
    type Output = Units;

    fn add(self, rhs: Units) -> Units {
        Units(self.0 + rhs.0)
    }
}

impl Sub for Units {
    type Output = Units;

    fn sub(self, rhs: Units) -> Units {
        Units(self.0 - rhs.0)
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Size of one resource quantum, in the instance's nominal energy unit.
///
/// The default quantum is `1e-3`. When the reciprocal of the step is an
/// integer (the usual `10^-k` case) conversions divide by that integer, so a
/// decimal such as `0.3` survives a load/save round trip unchanged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantization {
    step: f64,
    per_nominal: Option<f64>,
}

impl Default for Quantization {
    fn default() -> Self {
        Quantization::new(1e-3).expect("default step is valid")
    }
}

impl Quantization {
    /// Returns `None` unless `step` is finite and strictly positive.
    pub fn new(step: f64) -> Option<Quantization> {
        if !(step.is_finite() && step > 0.0) {
            return None;
        }
        let recip = 1.0 / step;
        let rounded = recip.round();
        let per_nominal =
            (rounded >= 1.0 && (recip - rounded).abs() <= 1e-9 * rounded).then_some(rounded);
        Some(Quantization { step, per_nominal })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Rounds a nominal amount to the nearest quantum (ties to even) and
    /// returns the absolute rounding error in nominal units.
    pub fn to_units(&self, nominal: f64) -> (Units, f64) {
        let scaled = match self.per_nominal {
            Some(k) => nominal * k,
            None => nominal / self.step,
        };
        let rounded = scaled.round_ties_even();
        let units = Units(rounded as i64);
        let err = (self.to_nominal(units) - nominal).abs();
        (units, err)
    }

    pub fn to_nominal(&self, units: Units) -> f64 {
        match self.per_nominal {
            Some(k) => units.0 as f64 / k,
            None => units.0 as f64 * self.step,
        }
    }
}
