//! Rational integer primitives: Jacobi symbols, modular square roots,
//! primality, and small factoring helpers used throughout the crate.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Jacobi symbol (a/n) for odd n >= 1.
///
/// Returns 0 exactly when gcd(a, n) > 1. For prime n this is the Legendre
/// symbol, which is how the residue-field code uses it.
pub fn jacobi(a: i64, n: u64) -> Result<i32> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let mut n = n;
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut sign = 1i32;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Jacobi symbol with a big numerator: reduces mod n first.
pub fn jacobi_big(a: &BigInt, n: u64) -> Result<i32> {
    jacobi(big_mod_u64(a, n) as i64, n)
}

/// Reduce a big integer into [0, n).
pub fn big_mod_u64(a: &BigInt, n: u64) -> u64 {
    use num_integer::Integer;
    let m = a.mod_floor(&BigInt::from(n));
    let (_, digits) = m.to_u64_digits();
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in [2, limit], by sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

/// Square root of a modulo an odd prime p (Tonelli-Shanks).
/// Returns None when a is a non-residue.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 {
        return Some(a);
    }
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // write p-1 = q * 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    // find a non-residue z
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// True iff |n| is squarefree (n = 0 counts as not squarefree).
pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Distinct prime divisors of |n|.
pub fn prime_divisors(n: i64) -> Vec<u64> {
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Factor a positive big integer by trial division.
///
/// All integers factored here are norms of ideals built from small primes,
/// so they are smooth; the cap only guards against misuse.
pub fn factor_big(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_negative() || n.is_zero() {
        return Err(Error::domain("factor_big needs a positive integer"));
    }
    let mut m = n.clone();
    let one = BigInt::from(1);
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    let cap = 10_000_000u64;
    while m > one {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            // remainder is prime
            let digits = m.to_u64_digits().1;
            if digits.len() > 1 {
                return Err(Error::inconclusive("factor_big: large prime remainder", cap));
            }
            out.push((digits[0], 1));
            break;
        }
        use num_integer::Integer;
        let mut e = 0u32;
        loop {
            let (q, r) = m.div_rem(&pb);
            if r.is_zero() {
                m = q;
                e += 1;
            } else {
                break;
            }
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
        if p > cap {
            return Err(Error::inconclusive("factor_big: trial division cap", cap));
        }
    }
    Ok(out)
}

/// Exact integer square root of a non-negative big integer, or None if the
/// input is negative or not a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Extended gcd: returns (g, u, v) with g = u*a + v*b, g >= 0.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force quadratic-residue oracle: (a/n) for odd prime-power free n
    /// by multiplying Legendre symbols computed from explicit square sets.
    fn jacobi_oracle(a: i64, n: u64) -> i32 {
        let mut result = 1i32;
        let mut m = n;
        let mut p = 3u64;
        // n odd, factor it
        let mut factors = Vec::new();
        while p * p <= m {
            while m.is_multiple_of(p) {
                factors.push(p);
                m /= p;
            }
            p += 2;
        }
        if m > 1 {
            factors.push(m);
        }
        for p in factors {
            let r = a.rem_euclid(p as i64) as u64;
            if r == 0 {
                return 0;
            }
            let mut is_square = false;
            for x in 1..p {
                if mul_mod(x, x, p) == r {
                    is_square = true;
                    break;
                }
            }
            if !is_square {
                result = -result;
            }
        }
        result
    }

    #[test]
    fn jacobi_basics() {
        assert_eq!(jacobi(1, 7).unwrap(), 1);
        assert_eq!(jacobi(1, 45).unwrap(), 1);
        // squares mod 7 are {1, 2, 4}; -1 = 6 is not among them
        assert_eq!(jacobi(-1, 7).unwrap(), -1);
        // (2/15) = (2/3)(2/5) = (-1)(-1)
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(6, 15).unwrap(), 0);
    }

    #[test]
    fn jacobi_rejects_bad_modulus() {
        assert!(jacobi(3, 4).is_err());
        assert!(jacobi(3, 0).is_err());
    }

    #[test]
    fn jacobi_matches_enumeration_up_to_200() {
        for n in (1..=200u64).step_by(2) {
            for a in 1..(n as i64) {
                assert_eq!(
                    jacobi(a, n).unwrap(),
                    jacobi_oracle(a, n),
                    "jacobi({a}, {n})"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn jacobi_multiplicative_in_numerator(a in -500i64..500, b in -500i64..500, k in 0u64..60) {
            let n = 2 * k + 3;
            let j = |x| jacobi(x, n).unwrap();
            prop_assert_eq!(j(a) * j(b), j(a.wrapping_mul(b)));
        }

        #[test]
        fn jacobi_multiplicative_in_denominator(a in -500i64..500, k1 in 0u64..40, k2 in 0u64..40) {
            let (n1, n2) = (2 * k1 + 3, 2 * k2 + 3);
            let j1 = jacobi(a, n1).unwrap();
            let j2 = jacobi(a, n2).unwrap();
            prop_assert_eq!(j1 * j2, jacobi(a, n1 * n2).unwrap());
        }
    }

    #[test]
    fn tonelli_finds_roots() {
        for &p in &[3u64, 5, 7, 11, 13, 17, 97, 101, 65537, 40961] {
            for a in 1..p.min(120) {
                match sqrt_mod_p(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a % p),
                    None => assert_eq!(pow_mod(a, (p - 1) / 2, p), p - 1),
                }
            }
        }
    }

    #[test]
    fn primality_small() {
        let sieve = primes_up_to(2000);
        for n in 0..=2000u64 {
            assert_eq!(is_prime(n), sieve.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001)); // 101 * 9901
    }

    #[test]
    fn squarefree_and_divisors() {
        assert!(is_squarefree(10));
        assert!(is_squarefree(-30));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(0));
        assert_eq!(prime_divisors(-420), vec![2, 3, 5, 7]);
    }

    #[test]
    fn exact_sqrt_and_factor() {
        assert_eq!(exact_sqrt(&BigInt::from(144)), Some(BigInt::from(12)));
        assert_eq!(exact_sqrt(&BigInt::from(145)), None);
        assert_eq!(exact_sqrt(&BigInt::from(-4)), None);
        let f = factor_big(&BigInt::from(360)).unwrap();
        assert_eq!(f, vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn xgcd_bezout() {
        for a in -30i64..30 {
            for b in -30i64..30 {
                let (g, u, v) = xgcd(a, b);
                assert_eq!(g, u * a + v * b);
                assert!(g >= 0);
                if a != 0 || b != 0 {
                    assert_eq!(g, num_integer::gcd(a, b).abs());
                }
            }
        }
    }
}
