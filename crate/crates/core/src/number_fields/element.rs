use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FieldDescriptor;
use crate::error::{Error, Result};

/// `a + b*sqrt(D)` with exact rational coordinates; `b = 0` over Q.
///
/// Arithmetic between an element of Q and an element of Q(sqrt D) promotes
/// the rational operand. Mixing two different quadratic fields panics; use
/// [`AlgebraicNumber::same_field`] to check first when inputs are untrusted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    field: FieldDescriptor,
    a: BigRational,
    b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl AlgebraicNumber {
    pub fn new(field: FieldDescriptor, a: BigRational, b: BigRational) -> Result<Self> {
        if field == FieldDescriptor::Rational && !b.is_zero() {
            return Err(Error::FieldMismatch(
                "Q".into(),
                "element with a sqrt component".into(),
            ));
        }
        Ok(AlgebraicNumber { field, a, b })
    }

    pub fn rational(q: BigRational) -> Self {
        AlgebraicNumber {
            field: FieldDescriptor::Rational,
            a: q,
            b: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `a + b sqrt(D)` from integer-pair numerators over a common denominator.
    pub fn quadratic(d: i64, a: BigRational, b: BigRational) -> Result<Self> {
        let field = FieldDescriptor::real_quadratic(d)?;
        Ok(AlgebraicNumber { field, a, b })
    }

    pub fn zero(field: FieldDescriptor) -> Self {
        AlgebraicNumber {
            field,
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn one(field: FieldDescriptor) -> Self {
        AlgebraicNumber {
            field,
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }

    /// Reinterprets the element in `field` (only Q -> Q(sqrt D) or identity).
    pub fn in_field(&self, field: FieldDescriptor) -> Result<Self> {
        if self.field == field {
            return Ok(self.clone());
        }
        if self.b.is_zero() {
            return Ok(AlgebraicNumber {
                field,
                a: self.a.clone(),
                b: BigRational::zero(),
            });
        }
        Err(Error::FieldMismatch(
            self.field.to_string(),
            field.to_string(),
        ))
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn same_field(&self, other: &Self) -> bool {
        unify(self, other).is_ok()
    }

    fn radicand_rat(&self) -> BigRational {
        rat(self.field.radicand().unwrap_or(0))
    }

    pub fn conj(&self) -> Self {
        AlgebraicNumber {
            field: self.field,
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * self.radicand_rat()
    }

    pub fn trace(&self) -> BigRational {
        &self.a * rat(2)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Zero("inverse of zero"));
        }
        let n = self.norm();
        Ok(AlgebraicNumber {
            field: self.field,
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }

    /// Integer power; negative exponents invert (panics on zero).
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = AlgebraicNumber::one(self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Least positive integer `m` with `m * self` an algebraic integer.
    pub fn denominator(&self) -> BigInt {
        let m0 = self.a.denom().lcm(self.b.denom());
        if let FieldDescriptor::RealQuadratic { d } = self.field {
            if d.rem_euclid(4) == 1 && m0.is_even() && !self.b.is_zero() {
                let big_a = (&self.a * BigRational::from_integer(m0.clone())).to_integer();
                let big_b = (&self.b * BigRational::from_integer(m0.clone())).to_integer();
                if (big_a - big_b).is_even() {
                    return m0 / BigInt::from(2);
                }
            }
        }
        m0
    }

    pub fn is_integral(&self) -> bool {
        self.denominator().is_one()
    }

    /// Primitive integer minimal polynomial `[c0, c1, c2]` of
    /// `c0 X^2 + c1 X + c2` (or `[c0, c1]` for `c0 X + c1` when rational),
    /// with `c0 > 0`.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let coeffs: Vec<BigRational> = if self.b.is_zero() {
            vec![BigRational::one(), -self.a.clone()]
        } else {
            vec![BigRational::one(), -self.trace(), self.norm()]
        };
        let l = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Parses `a`, `a/b`, `a/b+c/d*sqrtD`, `c*sqrtD`, `sqrtD`; the field is
    /// Q(sqrt D) when a sqrt term is present and Q otherwise.
    pub fn parse_any(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let Some(pos) = s.find("sqrt") else {
            return Ok(Self::rational(parse_rational(&s)?));
        };
        let d: i64 = s[pos + 4..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad radicand in `{s}`")))?;
        let body = s[..pos].strip_suffix('*').unwrap_or(&s[..pos]);
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (rpart, cpart) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let a = parse_rational(rpart)?;
        let b = match cpart {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c)?,
        };
        AlgebraicNumber::quadratic(d, a, b)
    }

    /// Parses and places the value in `field`.
    pub fn parse_in(s: &str, field: FieldDescriptor) -> Result<Self> {
        Self::parse_any(s)?.in_field(field)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.strip_prefix('+').unwrap_or(s);
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
        Some((n, d)) => {
            let n = BigInt::from_str(n).map_err(|_| bad())?;
            let d = BigInt::from_str(d).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

fn unify(x: &AlgebraicNumber, y: &AlgebraicNumber) -> Result<FieldDescriptor> {
    match (x.field, y.field) {
        (f, g) if f == g => Ok(f),
        (FieldDescriptor::Rational, g) => Ok(g),
        (f, FieldDescriptor::Rational) => Ok(f),
        (f, g) => Err(Error::FieldMismatch(f.to_string(), g.to_string())),
    }
}

fn unify_or_panic(x: &AlgebraicNumber, y: &AlgebraicNumber) -> FieldDescriptor {
    match unify(x, y) {
        Ok(f) => f,
        Err(e) => panic!("{e}"),
    }
}

impl<'a> Add<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber {
            field: unify_or_panic(self, o),
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl<'a> Sub<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber {
            field: unify_or_panic(self, o),
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl<'a> Mul<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        let field = unify_or_panic(self, o);
        if self.b.is_zero() && o.b.is_zero() {
            return AlgebraicNumber {
                field,
                a: &self.a * &o.a,
                b: BigRational::zero(),
            };
        }
        let d = rat(field.radicand().unwrap_or(0));
        AlgebraicNumber {
            field,
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl<'a> Div<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn div(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        self * &o.inv().expect("division by zero")
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber {
            field: self.field,
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical (not numeric) order: by rational part, then sqrt coefficient.
impl Ord for AlgebraicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a
            .cmp(&other.a)
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| self.field.cmp(&other.field))
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.field.radicand();
        match d {
            Some(d) if !self.b.is_zero() => {
                if self.a.is_zero() {
                    write!(f, "{}*sqrt{d}", self.b)
                } else if self.b.is_negative() {
                    write!(f, "{}-{}*sqrt{d}", self.a, -self.b.clone())
                } else {
                    write!(f, "{}+{}*sqrt{d}", self.a, self.b)
                }
            }
            _ => write!(f, "{}", self.a),
        }
    }
}

impl FromStr for AlgebraicNumber {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_any(s)
    }
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse_any(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q2(a: i64, b: i64) -> AlgebraicNumber {
        AlgebraicNumber::quadratic(2, rat(a), rat(b)).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let t = AlgebraicNumber::parse_any("1/2+3/4*sqrt5").unwrap();
        assert_eq!(t.field().radicand(), Some(5));
        assert_eq!(t.to_string(), "1/2+3/4*sqrt5");
        let u = AlgebraicNumber::parse_any("1-sqrt2").unwrap();
        assert_eq!(u, q2(1, -1));
        assert_eq!(AlgebraicNumber::parse_any("-sqrt2").unwrap(), q2(0, -1));
        assert_eq!(
            AlgebraicNumber::parse_any("-7/14").unwrap(),
            AlgebraicNumber::from_ratio(-1, 2)
        );
        assert!(AlgebraicNumber::parse_any("1/0").is_err());
        assert!(AlgebraicNumber::parse_any("abc").is_err());
        assert!(AlgebraicNumber::parse_any("1+sqrt4").is_err());
    }

    #[test]
    fn unit_has_norm_minus_one() {
        let e = q2(1, 1);
        assert_eq!(e.norm(), rat(-1));
        assert_eq!(&e * &e.inv().unwrap(), AlgebraicNumber::one(e.field()));
        assert_eq!(e.pow(-2), e.pow(2).inv().unwrap());
    }

    #[test]
    fn denominators() {
        let w = AlgebraicNumber::parse_any("1/2+1/2*sqrt5").unwrap();
        assert!(w.is_integral());
        let h = AlgebraicNumber::parse_any("1/2*sqrt5").unwrap();
        assert_eq!(h.denominator(), BigInt::from(2));
        let t = AlgebraicNumber::parse_any("1/2+1/2*sqrt2").unwrap();
        assert_eq!(t.denominator(), BigInt::from(2));
        assert_eq!(
            AlgebraicNumber::from_ratio(3, 4).denominator(),
            BigInt::from(4)
        );
    }

    #[test]
    fn minimal_polynomials() {
        let w = AlgebraicNumber::parse_any("1/2+1/2*sqrt5").unwrap();
        assert_eq!(
            w.minimal_polynomial(),
            vec![BigInt::from(1), BigInt::from(-1), BigInt::from(-1)]
        );
        let t = AlgebraicNumber::parse_any("1/2*sqrt2").unwrap();
        // X^2 - 1/2 -> 2X^2 - 1
        assert_eq!(
            t.minimal_polynomial(),
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(-1)]
        );
    }

    #[test]
    fn rational_promotes() {
        let two = AlgebraicNumber::from_int(2);
        let s = q2(0, 1);
        let p = &two * &s;
        assert_eq!(p, q2(0, 2));
        assert_eq!(p.field(), s.field());
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(a in -50i64..50, b in -50i64..50, c in 1i64..20, e in 1i64..20) {
            let t = AlgebraicNumber::quadratic(
                7,
                BigRational::new(BigInt::from(a), BigInt::from(c)),
                BigRational::new(BigInt::from(b), BigInt::from(e)),
            ).unwrap();
            let back = AlgebraicNumber::parse_in(&t.to_string(), t.field()).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn norm_is_multiplicative(a in -30i64..30, b in -30i64..30, c in -30i64..30, e in -30i64..30) {
            let x = q2(a, b);
            let y = q2(c, e);
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }
    }
}
