//! Places of Q and Q(sqrt D), valuations and normalized absolute values.
//!
//! Normalization: `|t|_w` extends the usual absolute value of Q at the
//! rational place below `w`, so at a finite place `|t|_w = p^(-ord_w(t)/e_w)`.
//! The local degree `n_w = [L_w : Q_p]` is `e_w * f_w`, which makes
//! `sum_w n_w log|t|_w = 0` hold for every nonzero `t`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgebraicNumber, FieldDescriptor};
use crate::arith::{
    is_prime, kronecker, padic_sqrt, sqrt_mod_prime, valuation, valuation_rational,
};
use crate::ball::{ln_rational_abs, ln_u64, Ball};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
    /// A prime of Q itself.
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Place {
    /// Real embedding; index 0 sends sqrt D to the positive root, index 1 to
    /// the negative one.
    #[serde(rename = "arch")]
    Archimedean { index: u8 },
    /// Prime ideal above `p`. For split primes, index 0 is the ideal in
    /// which sqrt D is congruent to the smaller residue root of `D mod p`
    /// (for p = 2: to the 2-adic root that is 1 mod 4).
    #[serde(rename = "finite")]
    Finite { p: u64, split: SplitType, index: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeOrInfinity {
    Infinity,
    Prime(u64),
}

impl fmt::Display for PrimeOrInfinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeOrInfinity::Infinity => write!(f, "inf"),
            PrimeOrInfinity::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Archimedean { .. })
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Archimedean { .. } => None,
            Place::Finite { p, .. } => Some(*p),
        }
    }

    /// Norm of the prime ideal; `None` at archimedean places.
    pub fn ideal_norm(&self) -> Option<u64> {
        match *self {
            Place::Archimedean { .. } => None,
            Place::Finite {
                p,
                split: SplitType::Inert,
                ..
            } => Some(p * p),
            Place::Finite { p, .. } => Some(p),
        }
    }

    /// `N(w)` in the lower bound for linear forms: 2 at archimedean places,
    /// the ideal norm otherwise.
    pub fn baker_norm(&self) -> u64 {
        self.ideal_norm().unwrap_or(2)
    }

    /// Local degree `n_w`.
    pub fn local_degree(&self) -> u32 {
        match self {
            Place::Archimedean { .. } => 1,
            Place::Finite { split, .. } => match split {
                SplitType::Split | SplitType::Rational => 1,
                SplitType::Inert | SplitType::Ramified => 2,
            },
        }
    }

    pub fn ramification(&self) -> u32 {
        match self {
            Place::Finite {
                split: SplitType::Ramified,
                ..
            } => 2,
            _ => 1,
        }
    }

    /// The place of Q below this one.
    pub fn base(&self) -> PrimeOrInfinity {
        match self {
            Place::Archimedean { .. } => PrimeOrInfinity::Infinity,
            Place::Finite { p, .. } => PrimeOrInfinity::Prime(*p),
        }
    }

    /// Checks that the place exists in `field`.
    pub fn validate(&self, field: FieldDescriptor) -> Result<()> {
        let ok = match (*self, field) {
            (Place::Archimedean { index }, f) => (index as u32) < f.degree(),
            (Place::Finite { p, split, index }, FieldDescriptor::Rational) => {
                is_prime(p) && split == SplitType::Rational && index == 0
            }
            (Place::Finite { p, split, index }, f) => {
                is_prime(p)
                    && split == splitting(f, p)
                    && (index == 0 || (index == 1 && split == SplitType::Split))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidPlace(format!("{self} in {field}")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean { index } => write!(f, "inf{index}"),
            Place::Finite {
                p,
                split: SplitType::Split,
                index,
            } => write!(f, "p{p}.{index}"),
            Place::Finite { p, .. } => write!(f, "p{p}"),
        }
    }
}

fn splitting(field: FieldDescriptor, p: u64) -> SplitType {
    match field {
        FieldDescriptor::Rational => SplitType::Rational,
        FieldDescriptor::RealQuadratic { .. } => match kronecker(field.discriminant(), p) {
            0 => SplitType::Ramified,
            1 => SplitType::Split,
            _ => SplitType::Inert,
        },
    }
}

/// Places of `field` above a rational prime or above infinity.
pub fn places_above(p: PrimeOrInfinity, field: FieldDescriptor) -> Result<Vec<Place>> {
    field.validate()?;
    match p {
        PrimeOrInfinity::Infinity => Ok((0..field.degree() as u8)
            .map(|index| Place::Archimedean { index })
            .collect()),
        PrimeOrInfinity::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let split = splitting(field, p);
            let n = if split == SplitType::Split { 2 } else { 1 };
            Ok((0..n)
                .map(|index| Place::Finite { p, split, index })
                .collect())
        }
    }
}

/// A finite set of places of one field containing every archimedean place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceSet {
    field: FieldDescriptor,
    places: Vec<Place>,
}

impl PlaceSet {
    pub fn new(field: FieldDescriptor, mut places: Vec<Place>) -> Result<Self> {
        field.validate()?;
        for w in &places {
            w.validate(field)?;
        }
        places.sort();
        if places.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPlaceSet("duplicate place".into()));
        }
        for w in places_above(PrimeOrInfinity::Infinity, field)? {
            if !places.contains(&w) {
                return Err(Error::InvalidPlaceSet(format!(
                    "missing archimedean place {w}"
                )));
            }
        }
        Ok(PlaceSet { field, places })
    }

    /// Archimedean places plus every place above each listed prime.
    pub fn from_primes(field: FieldDescriptor, primes: &[u64]) -> Result<Self> {
        let mut places = places_above(PrimeOrInfinity::Infinity, field)?;
        for &p in primes {
            let above = places_above(PrimeOrInfinity::Prime(p), field)?;
            if above.iter().any(|w| places.contains(w)) {
                return Err(Error::InvalidPlaceSet(format!("prime {p} listed twice")));
            }
            places.extend(above);
        }
        PlaceSet::new(field, places)
    }

    pub fn archimedean(field: FieldDescriptor) -> Result<Self> {
        PlaceSet::from_primes(field, &[])
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn contains(&self, w: &Place) -> bool {
        self.places.contains(w)
    }

    pub fn finite(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|w| !w.is_archimedean())
    }

    pub fn archimedean_places(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|w| w.is_archimedean())
    }

    /// Distinct rational primes below the finite places.
    pub fn primes_below(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.finite().filter_map(|w| w.prime()).collect();
        ps.dedup();
        ps
    }
}

fn check_compatible(t: &AlgebraicNumber, w: &Place) -> Result<FieldDescriptor> {
    let field = t.field();
    match (field, w) {
        // a rational value can be read at any place: |t|_w = |t|_p
        (FieldDescriptor::Rational, _) => Ok(field),
        (_, Place::Archimedean { index }) if *index < 2 => Ok(field),
        (_, Place::Finite { .. }) => {
            w.validate(field)
                .map_err(|_| Error::FieldMismatch(field.to_string(), format!("place {w}")))?;
            Ok(field)
        }
        _ => Err(Error::FieldMismatch(
            field.to_string(),
            format!("place {w}"),
        )),
    }
}

/// `ord_w(t)`, the exponent of the prime ideal `w` in `t`, so that
/// `|t|_w = p^(-ord_w(t) / e_w)`. Archimedean places are rejected.
pub fn ord(t: &AlgebraicNumber, w: &Place) -> Result<i64> {
    if t.is_zero() {
        return Err(Error::Zero("valuation of zero"));
    }
    let field = check_compatible(t, w)?;
    let Place::Finite { p, split, index } = *w else {
        return Err(Error::Domain("ord at an archimedean place".into()));
    };
    if let Some(q) = t.as_rational() {
        return Ok(valuation_rational(q, p) * w.ramification() as i64);
    }
    let n = t.norm();
    match split {
        SplitType::Rational => unreachable!("quadratic element at a rational place"),
        SplitType::Inert => Ok(valuation_rational(&n, p) / 2),
        SplitType::Ramified => Ok(valuation_rational(&n, p)),
        SplitType::Split => {
            let d = BigInt::from(field.radicand().expect("quadratic"));
            let m = t.a().denom().lcm(t.b().denom());
            let big_a = (t.a() * BigRational::from_integer(m.clone())).to_integer();
            let big_b = (t.b() * BigRational::from_integer(m.clone())).to_integer();
            let big_n = &big_a * &big_a - &d * &big_b * &big_b;
            let k = valuation(&big_n, p) + 2;
            let root = split_root(&d, p, index, k);
            let modulus = BigInt::from(p).pow(k);
            let image = (&big_a + &big_b * root).mod_floor(&modulus);
            debug_assert!(!image.is_zero());
            Ok(valuation(&image, p) as i64 - valuation(&m, p) as i64)
        }
    }
}

/// The p-adic square root of D attached to a split place, modulo p^k.
fn split_root(d: &BigInt, p: u64, index: u8, k: u32) -> BigInt {
    if p == 2 {
        let r = padic_sqrt(d, 2, 1, k);
        if index == 0 {
            r
        } else {
            let m = BigInt::one() << k;
            (&m - r).mod_floor(&m)
        }
    } else {
        let dm = d.mod_floor(&BigInt::from(p));
        let dm: u64 = dm.try_into().expect("residue fits");
        let r = sqrt_mod_prime(dm, p).expect("D is a square mod a split prime");
        let small = r.min(p - r);
        let r0 = if index == 0 { small } else { p - small };
        padic_sqrt(d, p, r0, k)
    }
}

/// Certified `ln |sigma(t)|` at a real embedding.
fn ln_abs_embedding(t: &AlgebraicNumber, index: u8) -> Ball {
    if let Some(q) = t.as_rational() {
        return ln_rational_abs(q);
    }
    let d = t.field().radicand().expect("quadratic") as u64;
    let sqrt_d = Ball::sqrt_u64(d);
    let a = Ball::from_rational(&t.a().abs());
    let b = Ball::from_rational(&t.b().abs());
    // u = |a| + |b| sqrt D has no cancellation; the conjugate-sign case is
    // recovered from the exact norm
    let u = if t.a().is_zero() {
        b * sqrt_d
    } else {
        a + b * sqrt_d
    };
    let sigma_b_positive = t.b().is_positive() == (index == 0);
    let same_sign = t.a().is_zero() || t.a().is_positive() == sigma_b_positive;
    if same_sign {
        u.ln()
    } else {
        ln_rational_abs(&t.norm()) - u.ln()
    }
}

/// Certified `ln |t|_w` for nonzero `t`.
pub fn log_abs(t: &AlgebraicNumber, w: &Place) -> Result<Ball> {
    if t.is_zero() {
        return Err(Error::Zero("log of |0|"));
    }
    check_compatible(t, w)?;
    match *w {
        Place::Archimedean { index } => Ok(ln_abs_embedding(t, index)),
        Place::Finite { p, .. } => {
            let k = ord(t, w)?;
            if k == 0 {
                return Ok(Ball::ZERO);
            }
            let e = w.ramification() as f64;
            Ok(ln_u64(p).scale(-(k as f64) / e))
        }
    }
}

/// `|t|_w` with the normalization described in the module docs.
pub fn abs_value(t: &AlgebraicNumber, w: &Place) -> Result<f64> {
    if t.is_zero() {
        check_compatible(t, w)?;
        return Ok(0.0);
    }
    match *w {
        Place::Finite { p, .. } => {
            let k = ord(t, w)?;
            let e = w.ramification() as f64;
            Ok((p as f64).powf(-(k as f64) / e))
        }
        Place::Archimedean { .. } => Ok(log_abs(t, w)?.mid.exp()),
    }
}

/// Rational primes below the places where `|t|_w != 1` (trial division).
pub fn support_primes(t: &AlgebraicNumber) -> Result<Vec<u64>> {
    if t.is_zero() {
        return Err(Error::Zero("support of zero"));
    }
    let m = t.denominator();
    let mt = t * &AlgebraicNumber::rational(BigRational::from_integer(m.clone()));
    let n = mt.norm().to_integer();
    let mut ps = crate::arith::prime_divisors(&n)?;
    ps.extend(crate::arith::prime_divisors(&m)?);
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}
