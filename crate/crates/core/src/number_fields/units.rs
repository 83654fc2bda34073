//! Fundamental units (continued fractions) and principal generators of
//! prime ideals (bounded norm-equation search).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::places::ord;
use super::{AlgebraicNumber, FieldDescriptor, Place, SplitType};
use crate::arith::{is_perfect_square, is_squarefree};
use crate::error::{Error, Result};

/// Hard ceiling on the norm-equation search radius.
pub const GENERATOR_SEARCH_CAP: u64 = 10_000_000;

fn half(n: BigInt) -> BigRational {
    BigRational::new(n, BigInt::from(2))
}

/// The fundamental unit `eps > 1` of the maximal order of Q(sqrt D).
///
/// Runs the continued fraction of `sqrt D` (D = 2, 3 mod 4) or of
/// `(1 + sqrt D)/2` (D = 1 mod 4) and stops at the first convergent whose
/// associated element has norm +-1.
pub fn fundamental_unit(d: i64) -> Result<AlgebraicNumber> {
    if d <= 1 || !is_squarefree(d as u64) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let dd = BigInt::from(d);
    let root = BigInt::from((d as f64).sqrt() as i64);
    // exact floor sqrt
    let mut isq = root;
    while &isq * &isq > dd {
        isq -= 1;
    }
    while (&isq + 1) * (&isq + 1) <= dd {
        isq += 1;
    }
    let omega_basis = d.rem_euclid(4) == 1;
    // (P + sqrt D)/Q
    let (mut p, mut q) = if omega_basis {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    for _ in 0..100_000 {
        let a = (&p + &isq) / &q;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        p = &a * &q - &p;
        q = (&dd - &p * &p) / &q;

        let unit = if omega_basis {
            // h - k * conj(omega) = (h - k/2) + (k/2) sqrt D
            let two_h_minus_k = BigInt::from(2) * &h - &k;
            AlgebraicNumber::quadratic(d, half(two_h_minus_k), half(k.clone()))?
        } else {
            AlgebraicNumber::quadratic(
                d,
                BigRational::from_integer(h.clone()),
                BigRational::from_integer(k.clone()),
            )?
        };
        let n = unit.norm();
        if n.abs().is_one() {
            return Ok(unit);
        }
    }
    Err(Error::Domain(format!(
        "continued fraction of sqrt {d} did not close"
    )))
}

/// A generator of the prime ideal `w` of a class-number-one field.
///
/// Inert primes are generated by `p`. Otherwise the search runs over
/// `x^2 - D y^2 = +-p` (or `X^2 - D Y^2 = +-4p` with `X = Y mod 2` when
/// D = 1 mod 4) for `|y|` up to `sqrt(p) (eps + 1) / sqrt(D)`, which covers
/// a unit-reduced generator whenever `w` is principal.
pub fn principal_generator(field: FieldDescriptor, w: &Place) -> Result<AlgebraicNumber> {
    w.validate(field)?;
    let Place::Finite { p, split, .. } = *w else {
        return Err(Error::Domain("generator of an archimedean place".into()));
    };
    let pi = AlgebraicNumber::from_int(p as i64);
    match split {
        SplitType::Rational => return Ok(pi),
        SplitType::Inert => return pi.in_field(field),
        SplitType::Split | SplitType::Ramified => {}
    }
    let d = field.radicand().expect("quadratic");
    let eps = fundamental_unit(d)?;
    let eps_f = eps.a().to_f64().unwrap_or(f64::INFINITY)
        + eps.b().to_f64().unwrap_or(f64::INFINITY) * (d as f64).sqrt();
    let bound = (p as f64).sqrt() * (eps_f + 1.0) / (d as f64).sqrt();
    let radius = if bound.is_finite() {
        (bound.ceil() as u64 + 2).min(GENERATOR_SEARCH_CAP)
    } else {
        GENERATOR_SEARCH_CAP
    };
    let omega_basis = d.rem_euclid(4) == 1;
    let scale: i64 = if omega_basis { 4 } else { 1 };
    let dd = BigInt::from(d);
    for y in 0..=radius {
        let y = BigInt::from(y);
        let dy2 = &dd * &y * &y;
        for sign in [1i64, -1] {
            let rhs = &dy2 + BigInt::from(sign * scale * p as i64);
            let Some(x) = is_perfect_square(&rhs) else {
                continue;
            };
            let cand = if omega_basis {
                if (&x - &y) % 2 != BigInt::zero() {
                    continue;
                }
                AlgebraicNumber::quadratic(d, half(x), half(y.clone()))?
            } else {
                AlgebraicNumber::quadratic(
                    d,
                    BigRational::from_integer(x),
                    BigRational::from_integer(y.clone()),
                )?
            };
            if ord(&cand, w)? == 1 {
                return Ok(cand);
            }
            let c = cand.conj();
            if ord(&c, w)? == 1 {
                return Ok(c);
            }
        }
    }
    Err(Error::NonPrincipal { p, radius })
}
