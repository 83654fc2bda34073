//! Effective height bounds for the S-unit equation `alpha x + beta y = 1`
//! over Q and real quadratic fields, together with an exhaustive solution
//! oracle and the combinatorics of the tubular Baker condition.

pub mod arith;
pub mod baker_bounds;
pub mod ball;
pub mod error;
pub mod heights;
pub mod number_fields;
pub mod s_units;
pub mod sunit_solver;
pub mod tubular;

pub use baker_bounds::{sunit_bound, BakerConstants, BoundReport, Branch, InjectedConstants};
pub use ball::Ball;
pub use error::{Error, Result};
pub use heights::{weil_height, MKConstant};
pub use number_fields::{AlgebraicNumber, FieldDescriptor, Place, PlaceSet};
pub use s_units::{FundamentalSystem, SUnitDecomposition};
pub use sunit_solver::{enumerate_solutions, verify_bound, SUnitEquation, Solution};
pub use tubular::{IncidenceData, PlaceSignature};
