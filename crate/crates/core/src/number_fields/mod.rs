//! Exact arithmetic in Q and real quadratic fields Q(sqrt D).

mod element;
mod places;
mod units;

pub use element::AlgebraicNumber;
pub use places::{
    abs_value, log_abs, ord, places_above, support_primes, Place, PlaceSet, PrimeOrInfinity,
    SplitType,
};
pub use units::{fundamental_unit, principal_generator};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::is_squarefree;
use crate::error::{Error, Result};

/// Q or a real quadratic field Q(sqrt D) with D squarefree and > 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDescriptor {
    Rational,
    RealQuadratic {
        #[serde(rename = "D")]
        d: i64,
    },
}

impl FieldDescriptor {
    pub fn real_quadratic(d: i64) -> Result<Self> {
        if d <= 1 || !is_squarefree(d as u64) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(FieldDescriptor::RealQuadratic { d })
    }

    pub fn degree(&self) -> u32 {
        match self {
            FieldDescriptor::Rational => 1,
            FieldDescriptor::RealQuadratic { .. } => 2,
        }
    }

    /// The radicand D, or `None` for Q.
    pub fn radicand(&self) -> Option<i64> {
        match self {
            FieldDescriptor::Rational => None,
            FieldDescriptor::RealQuadratic { d } => Some(*d),
        }
    }

    /// Field discriminant: D if D = 1 mod 4, else 4D; 1 for Q.
    pub fn discriminant(&self) -> i64 {
        match self {
            FieldDescriptor::Rational => 1,
            FieldDescriptor::RealQuadratic { d } if d.rem_euclid(4) == 1 => *d,
            FieldDescriptor::RealQuadratic { d } => 4 * d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldDescriptor::Rational => Ok(()),
            FieldDescriptor::RealQuadratic { d } => Self::real_quadratic(*d).map(|_| ()),
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::RealQuadratic { d } => write!(f, "Q(sqrt{d})"),
        }
    }
}
