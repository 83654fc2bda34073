//! Fixture equations shared by the benchmarks.

use baker_core::number_fields::{AlgebraicNumber, FieldDescriptor, PlaceSet};
use baker_core::SUnitEquation;

pub fn rational(primes: &[u64], alpha: &str, beta: &str) -> SUnitEquation {
    SUnitEquation::rational(primes, alpha, beta).expect("valid fixture")
}

pub fn quadratic(d: i64, primes: &[u64]) -> SUnitEquation {
    let k = FieldDescriptor::real_quadratic(d).expect("squarefree D");
    let places = PlaceSet::from_primes(k, primes).expect("valid primes");
    SUnitEquation::new(places, AlgebraicNumber::one(k), AlgebraicNumber::one(k))
        .expect("valid fixture")
}
