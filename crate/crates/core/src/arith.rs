//! Integer helpers: primality, trial-division factoring, valuations,
//! Kronecker symbols and square roots modulo prime powers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest trial divisor used by [`factor`]. Cofactors that survive trial
/// division and are not provably prime are reported as an error.
pub const TRIAL_DIVISION_LIMIT: u64 = 2_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Removes every factor `p` from `n`, returning the exponent.
pub fn remove_factor(n: &mut BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        *n = q;
        k += 1;
    }
    k
}

pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let mut m = n.clone();
    remove_factor(&mut m, p)
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rational(q: &num_rational::BigRational, p: u64) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

/// Full factorization by trial division up to [`TRIAL_DIVISION_LIMIT`]; a
/// leftover cofactor is accepted only if it is a 64-bit prime or the square
/// of one.
pub fn factor(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    let mut m = BigInt::from(n.clone());
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT {
        if m.is_one() {
            return Ok(out);
        }
        if let Some(small) = m.to_u64() {
            if p.saturating_mul(p) > small {
                out.push((small, 1));
                return Ok(out);
            }
        }
        let k = remove_factor(&mut m, p);
        if k > 0 {
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return Ok(out);
    }
    match m.to_u64() {
        Some(c) if is_prime(c) => {
            out.push((c, 1));
            Ok(out)
        }
        _ => {
            // norms of rational integers are squares
            let r = m.sqrt();
            match r.to_u64() {
                Some(c) if &r * &r == m && is_prime(c) => {
                    out.push((c, 2));
                    Ok(out)
                }
                _ => Err(Error::FactorizationLimit(n.to_string())),
            }
        }
    }
}

pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    Ok(factor(n.magnitude())?.into_iter().map(|(p, _)| p).collect())
}

/// Kronecker symbol `(a / p)` for a prime `p`.
pub fn kronecker(a: i64, p: u64) -> i8 {
    if p == 2 {
        if a % 2 == 0 {
            return 0;
        }
        return match a.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks: some `r` with `r^2 = a mod p`, `p` an odd prime.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// A root of `x^2 = d` in `Z_p`, returned modulo `p^k`.
///
/// For odd `p` the root is the Hensel lift of `root0` (a root mod `p`). For
/// `p = 2` (requires `d = 1 mod 8`) the root is the one that is `1 mod 4`,
/// and it is exact modulo `2^k`.
pub fn padic_sqrt(d: &BigInt, p: u64, root0: u64, k: u32) -> BigInt {
    if p == 2 {
        let target = k + 2;
        let mut r = BigInt::one();
        let mut j = 3u32;
        while j < target {
            let modulus = BigInt::one() << (j + 1);
            let diff = (&r * &r - d).mod_floor(&modulus);
            if !diff.is_zero() {
                r += BigInt::one() << (j - 1);
            }
            j += 1;
        }
        let modulus = BigInt::one() << k;
        let mut r = r.mod_floor(&modulus);
        if r.mod_floor(&BigInt::from(4)) != BigInt::one() {
            r = (&modulus - r).mod_floor(&modulus);
        }
        return r;
    }
    let pb = BigInt::from(p);
    let mut r = BigInt::from(root0);
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let modulus = pb.pow(prec);
        let f = (&r * &r - d).mod_floor(&modulus);
        let two_r = (BigInt::from(2) * &r).mod_floor(&modulus);
        let inv = mod_inverse(&two_r, &modulus).expect("2r is a unit for split odd p");
        r = (&r - f * inv).mod_floor(&modulus);
    }
    r.mod_floor(&pb.pow(k))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn biguint_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn factor_accepts_square_of_large_prime() {
        let p = 1_000_000_007u64;
        let n = BigUint::from(3u32) * BigUint::from(p) * BigUint::from(p);
        assert_eq!(factor(&n).unwrap(), vec![(3, 1), (p, 2)]);
    }

    #[test]
    fn factor_round_trips() {
        let n =
            BigUint::from(2u32).pow(5) * BigUint::from(3u32).pow(2) * BigUint::from(1_000_003u64);
        let f = factor(&n).unwrap();
        assert_eq!(f, vec![(2, 5), (3, 2), (1_000_003, 1)]);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
    }

    #[test]
    fn tonelli_shanks() {
        for p in [7u64, 17, 41, 97, 113, 1_000_000_007] {
            for a in 1..30u64 {
                if let Some(r) = sqrt_mod_prime(a, p) {
                    assert_eq!(mul_mod(r, r, p), a % p);
                }
            }
        }
    }

    #[test]
    fn hensel_lift_is_a_root() {
        let d = BigInt::from(2);
        let r0 = sqrt_mod_prime(2, 7).unwrap();
        let r = padic_sqrt(&d, 7, r0, 20);
        let m = BigInt::from(7).pow(20);
        assert!((&r * &r - &d).mod_floor(&m).is_zero());

        let d = BigInt::from(17);
        let r = padic_sqrt(&d, 2, 1, 40);
        let m = BigInt::one() << 40;
        assert!((&r * &r - &d).mod_floor(&m).is_zero());
        assert_eq!(r.mod_floor(&BigInt::from(4)), BigInt::one());
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(2));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert!(is_squarefree(1));
    }
}
