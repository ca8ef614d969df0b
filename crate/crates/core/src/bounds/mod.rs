//! Lower and upper bounds on the probability that no event of a family occurs.
//!
//! Every bound is evaluated in floating point with outward rounding (see
//! [`crate::interval`]): lower bounds are rounded down and upper bounds up.
//! Hypotheses are checked in exact rational arithmetic wherever the
//! quantities are rational.

mod asymptotic;
mod lll;
mod sparse;

pub use asymptotic::{asymptotic_bracket, quotient_events, Quotient};
pub use lll::{embedding_ratio_bound, l5_lower_bound, lll_lower_bound, simple_lower_bound, LllOutcome};
pub use sparse::{delta_sparseness, near_positive_epsilon, upper_bound, DeltaChoice, SparsenessReport};

use num_rational::BigRational;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::fmt_rational;
use crate::family::FamilyError;
use crate::interval::Interval;
use crate::report::{self, fmt_f64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("epsilon must lie in (0, 0.14), got {0}")]
    BadEpsilon(f64),
    #[error("delta must be a finite number >= 0, got {0}")]
    BadDelta(f64),
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("x[{index}] = {value} is outside [0, 1)")]
    BadWeight { index: usize, value: f64 },
    #[error("the family is not regular")]
    NotRegular,
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("class {class}: members {first} and {second} do not conflict, so their events can co-occur")]
    ClassNotExclusive { class: usize, first: usize, second: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A bound value, or a marker that its hypotheses failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Value(f64),
    Inapplicable,
}

impl Bound {
    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Value(v) => Some(v),
            Bound::Inapplicable => None,
        }
    }

    pub fn is_applicable(self) -> bool {
        matches!(self, Bound::Value(_))
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Value(v) => s.serialize_str(&fmt_f64(*v)),
            Bound::Inapplicable => s.serialize_none(),
        }
    }
}

/// One checked hypothesis `lhs <op> rhs`, with both sides rendered as strings
/// (`"num/den"` for exact rationals, 17 significant digits for floats).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl Check {
    pub fn rational(name: &str, lhs: &BigRational, rhs: &BigRational, holds: bool) -> Self {
        Check { name: name.to_string(), lhs: fmt_rational(lhs), rhs: fmt_rational(rhs), holds }
    }

    pub fn float(name: &str, lhs: f64, rhs: f64, holds: bool) -> Self {
        Check { name: name.to_string(), lhs: fmt_f64(lhs), rhs: fmt_f64(rhs), holds }
    }

    pub fn text(name: &str, lhs: impl Into<String>, rhs: impl Into<String>, holds: bool) -> Self {
        Check { name: name.to_string(), lhs: lhs.into(), rhs: rhs.into(), holds }
    }
}

/// A named dimensionless quantity describing how deep an instance sits in an
/// asymptotic regime; small is good.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRatio {
    pub name: String,
    #[serde(serialize_with = "report::f64_str")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lower: Bound,
    pub upper: Bound,
    /// `e^{-mu}`.
    #[serde(serialize_with = "report::opt_f64_str")]
    pub asymptotic: Option<f64>,
    /// The `epsilon` used by the upper bound, rounded up.
    #[serde(serialize_with = "report::opt_f64_str")]
    pub epsilon: Option<f64>,
    #[serde(serialize_with = "report::opt_rational_str")]
    pub delta: Option<BigRational>,
    pub validity: Vec<Check>,
    pub regime: Vec<RegimeRatio>,
}

impl BoundReport {
    fn empty() -> Self {
        BoundReport {
            lower: Bound::Inapplicable,
            upper: Bound::Inapplicable,
            asymptotic: None,
            epsilon: None,
            delta: None,
            validity: Vec::new(),
            regime: Vec::new(),
        }
    }

    /// The bracket for the empty family: nothing can go wrong.
    fn trivial() -> Self {
        BoundReport { lower: Bound::Value(1.0), upper: Bound::Value(1.0), asymptotic: Some(1.0), ..BoundReport::empty() }
    }

    pub fn all_hold(&self) -> bool {
        self.validity.iter().all(|c| c.holds)
    }
}

/// `e^{-mu}` rounded to nearest, for display.
fn asymptotic_value(mu: &BigRational) -> f64 {
    Interval::from_rational(mu).neg().exp().mid()
}
