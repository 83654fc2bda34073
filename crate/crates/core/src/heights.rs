//! Weil heights, local heights relative to closed subsets of projective
//! space, and M_K-constant bookkeeping.
//!
//! The local height of a point `P` relative to `Y = V(g_1, ..., g_m)` at a
//! place `w` is
//!
//! ```text
//! h_{Y,w}(P) = -log max_i |g_i(x_P)|_w / (||g_i||_w * ||x_P||_w^deg g_i)
//! ```
//!
//! which is nonnegative at finite places and positive exactly when `P`
//! reduces into `Y` modulo `w`. Vanishing generators contribute nothing to
//! the max; if all vanish, `P` lies on `Y`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::ball::{ln_biguint, ln_rational_abs, ln_u64, Ball};
use crate::error::{Error, Result};
use crate::number_fields::{
    log_abs, ord, places_above, support_primes, AlgebraicNumber, FieldDescriptor, Place,
    PrimeOrInfinity,
};

pub fn log_plus(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log+ of {x}")));
    }
    Ok(x.ln().max(0.0))
}

pub fn log_star(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log* of {x}")));
    }
    Ok(x.ln().max(1.0))
}

/// Absolute logarithmic Weil height; `h(0) = 0`.
///
/// Over Q this is `log max(|p|, |q|)`. For a quadratic irrational it is
/// `(log c0 + sum_sigma log+ |sigma t|) / 2` with `c0` the leading
/// coefficient of the primitive integral minimal polynomial.
pub fn weil_height(t: &AlgebraicNumber) -> Ball {
    if t.is_zero() {
        return Ball::ZERO;
    }
    if let Some(q) = t.as_rational() {
        let m = q.numer().magnitude().max(q.denom().magnitude());
        return ln_biguint(m);
    }
    let poly = t.minimal_polynomial();
    let lead = ln_biguint(poly[0].magnitude());
    let arch: Ball = (0..2u8)
        .map(|index| {
            log_abs(t, &Place::Archimedean { index })
                .expect("nonzero")
                .pos_part()
        })
        .sum();
    (lead + arch).scale(0.5)
}

/// `h_w(t) = log+ (1 / |t|_w)`, the local height of `t` relative to 0.
pub fn local_height_zero(t: &AlgebraicNumber, w: &Place) -> Result<Ball> {
    if t.is_zero() {
        return Err(Error::Zero("local height at the pole"));
    }
    match *w {
        Place::Finite { p, .. } => {
            let k = ord(t, w)?;
            if k <= 0 {
                return Ok(Ball::ZERO);
            }
            Ok(ln_u64(p).scale(k as f64 / w.ramification() as f64))
        }
        Place::Archimedean { .. } => Ok((-log_abs(t, w)?).pos_part()),
    }
}

/// Family of nonnegative reals indexed by places of Q, zero off a finite set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MKConstant {
    entries: BTreeMap<PrimeOrInfinity, f64>,
}

impl MKConstant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (PrimeOrInfinity, f64)>) -> Result<Self> {
        let mut c = MKConstant::zero();
        for (v, x) in entries {
            if !(x >= 0.0) {
                return Err(Error::Domain(format!(
                    "negative M_K-constant entry {x} at {v}"
                )));
            }
            if x > 0.0 {
                c.entries.insert(v, x);
            }
        }
        Ok(c)
    }

    pub fn get(&self, v: PrimeOrInfinity) -> f64 {
        self.entries.get(&v).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&PrimeOrInfinity, &f64)> {
        self.entries.iter()
    }

    pub fn add(&self, other: &MKConstant) -> MKConstant {
        let mut out = self.clone();
        for (v, x) in &other.entries {
            *out.entries.entry(*v).or_insert(0.0) += x;
        }
        out
    }

    pub fn scale(&self, c: f64) -> Result<MKConstant> {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("negative scale factor {c}")));
        }
        MKConstant::from_entries(self.entries.iter().map(|(v, x)| (*v, x * c)))
    }

    /// Raises each entry to the largest `|value|` sampled at its place.
    pub fn enlarge_to(&mut self, samples: &[(PrimeOrInfinity, f64)]) {
        for (v, x) in samples {
            if x.abs() > 0.0 {
                let e = self.entries.entry(*v).or_insert(0.0);
                *e = e.max(x.abs());
            }
        }
    }

    /// True iff every sample satisfies `|f(P, w)| <= c_v` (with `1e-12` slack
    /// for rounding).
    pub fn dominates(&self, samples: &[(PrimeOrInfinity, f64)]) -> bool {
        samples.iter().all(|(v, x)| x.abs() <= self.get(*v) + 1e-12)
    }
}

impl Serialize for MKConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.entries.len()))?;
        for (v, x) in &self.entries {
            m.serialize_entry(&v.to_string(), x)?;
        }
        m.end()
    }
}

/// A point of projective space with coordinates in one field.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    field: FieldDescriptor,
    coords: Vec<AlgebraicNumber>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<AlgebraicNumber>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|c| c.is_zero()) {
            return Err(Error::Zero("projective point with all coordinates zero"));
        }
        let field = coords.iter().map(|c| c.field()).max().expect("nonempty");
        let coords = coords
            .into_iter()
            .map(|c| c.in_field(field))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectivePoint { field, coords })
    }

    pub fn from_rationals(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            coords
                .iter()
                .map(|&(n, d)| AlgebraicNumber::from_ratio(n, d))
                .collect(),
        )
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn coords(&self) -> &[AlgebraicNumber] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn scaled(&self, lambda: &AlgebraicNumber) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Zero("scaling a projective point by zero"));
        }
        ProjectivePoint::new(self.coords.iter().map(|c| c * lambda).collect())
    }
}

/// Homogeneous polynomial with rational coefficients, stored as
/// `(coefficient, exponent vector)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial {
    terms: Vec<(BigRational, Vec<u32>)>,
    degree: u32,
}

impl HomogeneousPolynomial {
    pub fn new(terms: Vec<(BigRational, Vec<u32>)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        let Some((_, first)) = terms.first() else {
            return Err(Error::Domain("zero polynomial".into()));
        };
        let nvars = first.len();
        let degree: u32 = first.iter().sum();
        for (_, e) in &terms {
            if e.len() != nvars || e.iter().sum::<u32>() != degree {
                return Err(Error::Domain("polynomial is not homogeneous".into()));
            }
        }
        Ok(HomogeneousPolynomial { terms, degree })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(terms: &[(i64, &[u32])]) -> Result<Self> {
        Self::new(
            terms
                .iter()
                .map(|(c, e)| (BigRational::from_integer(BigInt::from(*c)), e.to_vec()))
                .collect(),
        )
    }

    /// The coordinate function `X_i` in `n_vars` variables.
    pub fn variable(i: usize, n_vars: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        HomogeneousPolynomial {
            terms: vec![(BigRational::from_integer(BigInt::from(1)), e)],
            degree: 1,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n_vars(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &BigRational> {
        self.terms.iter().map(|(c, _)| c)
    }

    pub fn evaluate(&self, x: &[AlgebraicNumber]) -> AlgebraicNumber {
        let field = x
            .iter()
            .map(|c| c.field())
            .max()
            .unwrap_or(FieldDescriptor::Rational);
        let mut acc = AlgebraicNumber::zero(field);
        for (c, e) in &self.terms {
            let mut m = AlgebraicNumber::rational(c.clone());
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m = &m * &xi.pow(k as i64);
                }
            }
            acc = &acc + &m;
        }
        acc
    }
}

/// Closed subset of P^N given by homogeneous generators of its ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSubsetSpec {
    dimension: usize,
    generators: Vec<HomogeneousPolynomial>,
}

impl ClosedSubsetSpec {
    pub fn new(dimension: usize, generators: Vec<HomogeneousPolynomial>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Domain(
                "closed subset needs at least one generator".into(),
            ));
        }
        if generators.iter().any(|g| g.n_vars() != dimension + 1) {
            return Err(Error::Domain(
                "generator in the wrong number of variables".into(),
            ));
        }
        Ok(ClosedSubsetSpec {
            dimension,
            generators,
        })
    }

    pub fn generators(&self) -> &[HomogeneousPolynomial] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

fn check_dims(p: &ProjectivePoint, y: &ClosedSubsetSpec) -> Result<()> {
    if p.dimension() != y.dimension {
        return Err(Error::Domain(format!(
            "point in P^{} but subset in P^{}",
            p.dimension(),
            y.dimension
        )));
    }
    Ok(())
}

/// `h_{Y,w}(P)`.
pub fn local_height_subset(p: &ProjectivePoint, y: &ClosedSubsetSpec, w: &Place) -> Result<Ball> {
    check_dims(p, y)?;
    let values: Vec<(AlgebraicNumber, &HomogeneousPolynomial)> = y
        .generators
        .iter()
        .map(|g| (g.evaluate(&p.coords), g))
        .filter(|(v, _)| !v.is_zero())
        .collect();
    if values.is_empty() {
        return Err(Error::PointOnSubset);
    }
    match *w {
        Place::Finite { p: prime, .. } => {
            // work with valuations: log|t|_w = -ord_w(t) log p / e
            let min_ord = |xs: &mut dyn Iterator<Item = &AlgebraicNumber>| -> Result<i64> {
                let mut best: Option<i64> = None;
                for x in xs.filter(|x| !x.is_zero()) {
                    let o = ord(x, w)?;
                    best = Some(best.map_or(o, |b| b.min(o)));
                }
                Ok(best.expect("some nonzero entry"))
            };
            let x_ord = min_ord(&mut p.coords.iter())?;
            let mut best_log_ratio: Option<i64> = None;
            for (v, g) in &values {
                let coeffs: Vec<AlgebraicNumber> = g
                    .coefficients()
                    .map(|c| AlgebraicNumber::rational(c.clone()))
                    .collect();
                let g_ord = min_ord(&mut coeffs.iter())?;
                // log ratio * e / log p
                let r = -ord(v, w)? + g_ord + g.degree as i64 * x_ord;
                best_log_ratio = Some(best_log_ratio.map_or(r, |b| b.max(r)));
            }
            let k = -best_log_ratio.expect("nonempty");
            if k == 0 {
                return Ok(Ball::ZERO);
            }
            Ok(ln_u64(prime).scale(k as f64 / w.ramification() as f64))
        }
        Place::Archimedean { .. } if p.field == FieldDescriptor::Rational => {
            // exact rational ratio, one logarithm
            let x_norm = p
                .coords
                .iter()
                .map(|c| c.a().abs())
                .max()
                .expect("nonempty");
            let mut best: Option<BigRational> = None;
            for (v, g) in &values {
                let g_norm = g.coefficients().map(|c| c.abs()).max().expect("nonzero");
                let ratio = v.a().abs() / (g_norm * pow_rat(&x_norm, g.degree));
                best = Some(match best {
                    Some(b) if b >= ratio => b,
                    _ => ratio,
                });
            }
            Ok(-ln_rational_abs(&best.expect("nonempty")))
        }
        Place::Archimedean { .. } => {
            let x_log = p
                .coords
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| log_abs(c, w))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .reduce(Ball::max)
                .expect("nonempty");
            let mut best: Option<Ball> = None;
            for (v, g) in &values {
                let g_log = g
                    .coefficients()
                    .map(ln_rational_abs)
                    .reduce(Ball::max)
                    .expect("nonzero");
                let r = log_abs(v, w)? - g_log - x_log.scale(g.degree as f64);
                best = Some(best.map_or(r, |b| b.max(r)));
            }
            Ok(-best.expect("nonempty"))
        }
    }
}

fn pow_rat(q: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(1));
    for _ in 0..k {
        acc *= q;
    }
    acc
}

/// Places of `field` where some coordinate, generator value or coefficient
/// is not a unit, plus the archimedean places.
fn relevant_places(p: &ProjectivePoint, y: &ClosedSubsetSpec) -> Result<Vec<Place>> {
    let mut primes: Vec<u64> = Vec::new();
    let mut add = |t: &AlgebraicNumber| -> Result<()> {
        if !t.is_zero() {
            primes.extend(support_primes(t)?);
        }
        Ok(())
    };
    for c in &p.coords {
        add(c)?;
    }
    for g in &y.generators {
        add(&g.evaluate(&p.coords))?;
        for c in g.coefficients() {
            add(&AlgebraicNumber::rational(c.clone()))?;
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut places = places_above(PrimeOrInfinity::Infinity, p.field)?;
    for q in primes {
        places.extend(places_above(PrimeOrInfinity::Prime(q), p.field)?);
    }
    Ok(places)
}

/// `h_Y(P) = (1/d) sum_w n_w h_{Y,w}(P)` over all places of the field.
pub fn global_height_subset(p: &ProjectivePoint, y: &ClosedSubsetSpec) -> Result<Ball> {
    check_dims(p, y)?;
    let d = p.field.degree() as f64;
    let mut total = Ball::ZERO;
    for w in relevant_places(p, y)? {
        let h = local_height_subset(p, y, &w)?;
        total = total + h.scale(w.local_degree() as f64);
    }
    Ok(total.scale(1.0 / d))
}
