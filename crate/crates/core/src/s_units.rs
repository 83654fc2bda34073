//! S-unit groups of Q and class-number-one real quadratic fields:
//! fundamental systems, S-regulators, exponent decomposition and the norm
//! statistics `P_S`, `P'_S`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::remove_factor;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::heights::weil_height;
use crate::number_fields::{
    fundamental_unit, log_abs, ord, places_above, principal_generator, AlgebraicNumber,
    FieldDescriptor, Place, PlaceSet, PrimeOrInfinity,
};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `c_1(s) = ((s-1)!)^2 / (2^(s-1) d^(s-2))`, the constant in the product
/// bound `prod h(eps_i) <= c_1(s) R_S` for a well-chosen fundamental system.
pub fn product_bound_constant(d: u32, s: usize) -> Result<f64> {
    if s < 1 {
        return Err(Error::Domain("s must be at least 1".into()));
    }
    let s = s as i32;
    Ok(factorial(s as u32 - 1).powi(2) / (2f64.powi(s - 1) * f64::from(d).powi(s - 2)))
}

/// Brings a rational `t` into `field`, or checks that a quadratic `t`
/// already lives there.
fn into_field(t: &AlgebraicNumber, field: FieldDescriptor) -> Result<AlgebraicNumber> {
    if t.field() == field {
        return Ok(t.clone());
    }
    if t.is_rational() {
        return t.in_field(field);
    }
    Err(Error::FieldMismatch(
        t.field().to_string(),
        field.to_string(),
    ))
}

/// True iff `|t|_w = 1` at every place `w` outside `S`.
///
/// Needs no factorization: the primes below S are divided out of the
/// minimal denominator `m` and of `N(m t)`, and what is left must be a unit.
pub fn is_s_unit(t: &AlgebraicNumber, s: &PlaceSet) -> Result<bool> {
    if t.is_zero() {
        return Err(Error::Zero("S-unit test of zero"));
    }
    let t = into_field(t, s.field())?;
    let primes = s.primes_below();
    for &q in &primes {
        for w in places_above(PrimeOrInfinity::Prime(q), s.field())? {
            if !s.contains(&w) && ord(&t, &w)? != 0 {
                return Ok(false);
            }
        }
    }
    let m = t.denominator();
    let mt = &t * &AlgebraicNumber::rational(BigRational::from_integer(m.clone()));
    let n = mt.norm();
    debug_assert!(n.is_integer());
    Ok(is_unit_after_stripping(m, &primes) && is_unit_after_stripping(n.to_integer(), &primes))
}

/// Fast path over Q: `q` is an S-unit iff numerator and denominator are
/// products of the given primes, up to sign.
pub fn is_s_unit_rational(q: &BigRational, primes: &[u64]) -> bool {
    !q.is_zero()
        && is_unit_after_stripping(q.numer().clone(), primes)
        && is_unit_after_stripping(q.denom().clone(), primes)
}

fn is_unit_after_stripping(mut n: BigInt, primes: &[u64]) -> bool {
    for &p in primes {
        remove_factor(&mut n, p);
    }
    n.magnitude().is_one()
}

/// `epsilon_1, ..., epsilon_{s-1}` generating the S-units modulo `{+-1}`.
///
/// Over Q the units are the primes of S. Over Q(sqrt D) they are the
/// fundamental unit followed by a generator of each finite place of S.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalSystem {
    field: FieldDescriptor,
    places: PlaceSet,
    units: Vec<AlgebraicNumber>,
    torsion: AlgebraicNumber,
}

/// Outcome of the `prod h(eps_i) <= c_1(s) R_S` check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductBoundCheck {
    pub product: f64,
    pub bound: f64,
    pub holds: bool,
}

impl FundamentalSystem {
    pub fn new(s: &PlaceSet) -> Result<Self> {
        let field = s.field();
        let mut units = Vec::with_capacity(s.len().saturating_sub(1));
        if let Some(d) = field.radicand() {
            units.push(fundamental_unit(d)?);
        }
        for w in s.finite() {
            units.push(principal_generator(field, w)?);
        }
        debug_assert_eq!(units.len() + 1, s.len());
        Ok(FundamentalSystem {
            field,
            places: s.clone(),
            units,
            torsion: AlgebraicNumber::from_int(-1),
        })
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }

    pub fn units(&self) -> &[AlgebraicNumber] {
        &self.units
    }

    pub fn torsion(&self) -> &AlgebraicNumber {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.units.len()
    }

    /// `|det (n_w log|eps_j|_w)|` over the places of S other than `dropped`.
    pub fn regulator_dropping(&self, dropped: usize) -> Result<Ball> {
        let places = self.places.places();
        if dropped >= places.len() {
            return Err(Error::Domain(format!("no place with index {dropped}")));
        }
        if self.units.is_empty() {
            return Ok(Ball::exact(1.0));
        }
        let mut m = Vec::with_capacity(self.units.len());
        for (i, w) in places.iter().enumerate() {
            if i == dropped {
                continue;
            }
            let row = self
                .units
                .iter()
                .map(|e| Ok(log_abs(e, w)?.scale(f64::from(w.local_degree()))))
                .collect::<Result<Vec<_>>>()?;
            m.push(row);
        }
        Ok(determinant(m)?.abs())
    }

    /// The S-regulator, computed without the first archimedean place.
    pub fn regulator(&self) -> Result<Ball> {
        self.regulator_dropping(0)
    }

    pub fn product_bound_check(&self) -> Result<ProductBoundCheck> {
        let product: f64 = self.units.iter().map(|e| weil_height(e).hi()).product();
        let bound = product_bound_constant(self.field.degree(), self.places.len())?
            * self.regulator()?.lo();
        Ok(ProductBoundCheck {
            product,
            bound,
            holds: product <= bound * (1.0 + 1e-12),
        })
    }

    /// Writes an S-unit as `zeta * prod eps_i^b_i`.
    pub fn decompose(&self, u: &AlgebraicNumber) -> Result<SUnitDecomposition> {
        if !is_s_unit(u, &self.places)? {
            return Err(Error::NotSUnit(u.to_string()));
        }
        let u = into_field(u, self.field)?;
        let finite: Vec<&Place> = self.places.finite().collect();
        let offset = self.units.len() - finite.len();
        let mut exponents = vec![0i64; self.units.len()];
        let mut rest = u.clone();
        for (k, w) in finite.iter().enumerate() {
            let b = ord(&u, w)?;
            exponents[offset + k] = b;
            if b != 0 {
                rest = &rest / &self.units[offset + k].pow(b);
            }
        }
        // what remains is a unit of the ring of integers
        if offset == 1 {
            let eps = &self.units[0];
            let arch = Place::Archimedean { index: 0 };
            let ratio = log_abs(&rest, &arch)?.mid / log_abs(eps, &arch)?.mid;
            let k = ratio.round();
            if !k.is_finite() || k.abs() > 1e15 {
                return Err(Error::NotSUnit(u.to_string()));
            }
            let k = k as i64;
            exponents[0] = k;
            rest = &rest / &eps.pow(k);
        }
        let torsion = if rest.is_one() {
            1
        } else if (-&rest).is_one() {
            -1
        } else {
            return Err(Error::NotSUnit(u.to_string()));
        };
        Ok(SUnitDecomposition { torsion, exponents })
    }

    pub fn recompose(&self, dec: &SUnitDecomposition) -> Result<AlgebraicNumber> {
        if dec.exponents.len() != self.units.len() {
            return Err(Error::Domain("exponent vector has the wrong length".into()));
        }
        let mut acc = AlgebraicNumber::from_int(dec.torsion.into()).in_field(self.field)?;
        for (e, &b) in self.units.iter().zip(&dec.exponents) {
            if b != 0 {
                acc = &acc * &e.pow(b);
            }
        }
        Ok(acc)
    }
}

/// `zeta * prod eps_i^b_i` with `zeta = +-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnitDecomposition {
    pub torsion: i8,
    pub exponents: Vec<i64>,
}

impl SUnitDecomposition {
    /// `B = max |b_i|`.
    pub fn max_exponent(&self) -> u64 {
        self.exponents
            .iter()
            .map(|b| b.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// Determinant by Gaussian elimination with partial pivoting on midpoints.
fn determinant(mut m: Vec<Vec<Ball>>) -> Result<Ball> {
    let n = m.len();
    let mut det = Ball::exact(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].mid.abs().total_cmp(&m[b][col].mid.abs()))
            .expect("nonempty");
        if m[piv][col].contains(0.0) {
            return Err(Error::DegenerateSystem);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det = det * p;
        for r in col + 1..n {
            let f = m[r][col].div(p);
            for c in col..n {
                let v = m[r][c] - f * m[col][c];
                m[r][c] = v;
            }
        }
    }
    Ok(det)
}

/// `R_S` for the constructive fundamental system; 1 when `s = 1`.
pub fn s_regulator(s: &PlaceSet) -> Result<Ball> {
    FundamentalSystem::new(s)?.regulator()
}

/// `(P_S, P'_S)`: the largest and the third largest ideal norm over the
/// finite places of S, counted with multiplicity, each 1 when missing.
pub fn prime_norm_stats(s: &PlaceSet) -> (u64, u64) {
    let mut norms: Vec<u64> = s.finite().filter_map(|w| w.ideal_norm()).collect();
    norms.sort_unstable_by(|a, b| b.cmp(a));
    (
        norms.first().copied().unwrap_or(1),
        norms.get(2).copied().unwrap_or(1),
    )
}
