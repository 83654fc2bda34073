//! Midpoint-radius real balls with outward-rounded error propagation.
//!
//! `mid` is the value an ordinary `f64` computation would produce; `rad`
//! bounds the distance to the true real number. Every operation adds at
//! least one ulp of slack for its own rounding, and transcendental functions
//! (`ln`) add two, which covers glibc/musl accuracy of `log`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub mid: f64,
    pub rad: f64,
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        f64::MIN_POSITIVE
    } else {
        a.next_up() - a
    }
}

impl Ball {
    pub const ZERO: Ball = Ball { mid: 0.0, rad: 0.0 };

    pub fn exact(x: f64) -> Self {
        Ball { mid: x, rad: 0.0 }
    }

    pub fn new(mid: f64, rad: f64) -> Self {
        debug_assert!(rad >= 0.0);
        Ball { mid, rad }
    }

    pub fn lo(&self) -> f64 {
        (self.mid - self.rad).next_down()
    }

    pub fn hi(&self) -> f64 {
        (self.mid + self.rad).next_up()
    }

    pub fn ln2() -> Self {
        Ball::new(std::f64::consts::LN_2, ulp(std::f64::consts::LN_2))
    }

    pub fn pi() -> Self {
        Ball::new(std::f64::consts::PI, ulp(std::f64::consts::PI))
    }

    /// Ball around `x` carrying one ulp of representation error.
    pub fn approx(x: f64) -> Self {
        Ball::new(x, ulp(x))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let v = q.to_f64().unwrap_or(f64::NAN);
        Ball::approx(v)
    }

    pub fn scale(self, k: f64) -> Self {
        let mid = self.mid * k;
        Ball::new(mid, self.rad * k.abs() + ulp(mid))
    }

    pub fn max(self, other: Ball) -> Ball {
        if self.mid >= other.mid {
            Ball::new(self.mid, self.rad.max(other.rad))
        } else {
            Ball::new(other.mid, self.rad.max(other.rad))
        }
    }

    /// `max(self, 0)`.
    pub fn pos_part(self) -> Ball {
        if self.lo() >= 0.0 {
            self
        } else if self.hi() <= 0.0 {
            Ball::ZERO
        } else {
            Ball::new(self.mid.max(0.0), self.rad)
        }
    }

    pub fn abs(self) -> Ball {
        Ball::new(self.mid.abs(), self.rad)
    }

    pub fn recip(self) -> Ball {
        let lo = self.mid.abs() - self.rad;
        assert!(lo > 0.0, "reciprocal of a ball containing zero");
        let mid = 1.0 / self.mid;
        Ball::new(mid, self.rad / (lo * lo) + 2.0 * ulp(mid))
    }

    pub fn div(self, other: Ball) -> Ball {
        self * other.recip()
    }

    /// Natural logarithm; panics unless the ball is strictly positive.
    pub fn ln(self) -> Ball {
        let lo = self.mid - self.rad;
        assert!(lo > 0.0, "logarithm of a nonpositive ball");
        let mid = self.mid.ln();
        // |ln x - ln m| <= r / (m - r) on [m - r, m + r]
        Ball::new(mid, self.rad / lo + 2.0 * ulp(mid) + f64::MIN_POSITIVE)
    }

    pub fn sqrt_u64(d: u64) -> Ball {
        let mid = (d as f64).sqrt();
        Ball::new(mid, 2.0 * ulp(mid))
    }

    /// True when the whole ball lies at or below `other` up to `slack`.
    pub fn certainly_le(&self, other: &Ball, slack: f64) -> bool {
        self.hi() <= other.lo() + slack
    }

    /// True when the whole ball lies strictly above `other` beyond `slack`.
    pub fn certainly_gt(&self, other: &Ball, slack: f64) -> bool {
        self.lo() > other.hi() + slack
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, o: Ball) -> Ball {
        let mid = self.mid + o.mid;
        Ball::new(mid, self.rad + o.rad + ulp(mid))
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, o: Ball) -> Ball {
        let mid = self.mid - o.mid;
        Ball::new(mid, self.rad + o.rad + ulp(mid))
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::new(-self.mid, self.rad)
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, o: Ball) -> Ball {
        let mid = self.mid * o.mid;
        let rad = self.mid.abs() * o.rad + o.mid.abs() * self.rad + self.rad * o.rad;
        Ball::new(mid, rad + ulp(mid))
    }
}

impl std::iter::Sum for Ball {
    fn sum<I: Iterator<Item = Ball>>(iter: I) -> Ball {
        iter.fold(Ball::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.1e}", self.mid, self.rad)
    }
}

/// `ln n` for a positive big integer.
pub fn ln_biguint(n: &BigUint) -> Ball {
    assert!(!n.is_zero(), "ln(0)");
    let bits = n.bits();
    if bits <= 53 {
        let v = n.to_f64().expect("fits");
        let mid = v.ln();
        return Ball::new(mid, 2.0 * ulp(mid));
    }
    // n = m * 2^k + t with 0 <= t < 2^k and m carrying the top 63 bits
    let k = bits.saturating_sub(63);
    let m = (n >> k).to_u64().expect("63 bits");
    let mf = m as f64; // rounding: |mf - m| <= 2^10
    let lnm = mf.ln();
    let rel = (2048.0 + 1.0) / mf; // truncation plus conversion
    let lnk = Ball::ln2().scale(k as f64);
    let mid = lnm + lnk.mid;
    Ball::new(mid, lnk.rad + rel + 2.0 * ulp(lnm) + ulp(mid))
}

pub fn ln_bigint_abs(n: &BigInt) -> Ball {
    ln_biguint(n.magnitude())
}

/// `ln |q|` for a nonzero rational. Computed as `ln|num| - ln(den)`, so
/// `ln_rational_abs(1/q)` is the exact negation of `ln_rational_abs(q)`.
pub fn ln_rational_abs(q: &BigRational) -> Ball {
    assert!(!q.is_zero(), "ln(0)");
    let n = ln_bigint_abs(q.numer());
    let d = ln_bigint_abs(q.denom());
    n - d
}

/// `ln p` for a small prime (or any positive integer).
pub fn ln_u64(p: u64) -> Ball {
    ln_biguint(&BigUint::from(p))
}

pub fn sign_of(q: &BigRational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}
