//! Integer helpers shared by every module: divisors, Möbius function,
//! q-analogues and exact binomials.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Least common multiple of `1..=n`.
pub fn lcm_upto(n: u32) -> u64 {
    (1..=n as u64).fold(1, lcm)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result: u128 = 1;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    result as u64
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = extended_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// `q^e` as a big integer.
pub fn big_pow(q: u64, e: u64) -> BigInt {
    Pow::pow(BigInt::from(q), e)
}

/// `[m]_q = 1 + q + ... + q^{m-1}`.
pub fn q_int(m: u64, q: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut pw = BigInt::one();
    for _ in 0..m {
        acc += &pw;
        pw *= q;
    }
    acc
}

pub fn q_factorial(m: u64, q: &BigInt) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * q_int(i, q))
}

/// Gaussian binomial coefficient; zero outside `0 <= l <= m`.
pub fn q_binomial(m: u64, l: i64, q: &BigInt) -> BigInt {
    if l < 0 || l as u64 > m {
        return BigInt::zero();
    }
    let l = l as u64;
    let num = q_factorial(m, q);
    let den = q_factorial(l, q) * q_factorial(m - l, q);
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `[m]_x` for a rational argument, evaluated as the polynomial (so x = 1 is allowed).
pub fn q_int_rat(m: u64, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    for _ in 0..m {
        acc += &pw;
        pw *= x;
    }
    acc
}

pub fn q_binomial_rat(m: u64, l: u64, x: &BigRational) -> BigRational {
    if l > m {
        return BigRational::zero();
    }
    // Product form [m]![l]!^{-1}[m-l]!^{-1}, rearranged so every factor is a polynomial.
    let fact = |k: u64| (1..=k).fold(BigRational::one(), |acc, i| acc * q_int_rat(i, x));
    fact(m) / (fact(l) * fact(m - l))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Binomial coefficient with an arbitrary integer top, `C(n, k) = n(n-1)...(n-k+1)/k!`.
pub fn binomial_signed(n: i64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i as i64) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `(-1)^e` for a possibly negative exponent.
pub fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Integer power of a rational with a possibly negative exponent.
pub fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        Pow::pow(x.clone(), e as u64)
    } else {
        Pow::pow(x.recip(), e.unsigned_abs())
    }
}

pub fn big_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Returns the integer if `x` has denominator one.
pub fn rat_to_int(x: &BigRational) -> Option<BigInt> {
    if x.denom().is_one() {
        Some(x.numer().clone())
    } else {
        None
    }
}

pub fn is_nonneg(x: &BigInt) -> bool {
    !x.is_negative()
}

/// Prime powers `>= 2` in ascending order up to `limit`.
pub fn prime_powers_upto(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&q| prime_power_parts(q).is_some()).collect()
}

/// `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_small_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expect.iter().enumerate() {
            assert_eq!(moebius(i as u64 + 1), m, "mu({})", i + 1);
        }
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn q_binomial_matches_subspace_count() {
        // Number of 1-dim subspaces of F_2^3 is 7, 2-dim subspaces of F_3^4 is 130.
        assert_eq!(q_binomial(3, 1, &BigInt::from(2)), BigInt::from(7));
        assert_eq!(q_binomial(4, 2, &BigInt::from(3)), BigInt::from(130));
        assert_eq!(q_binomial(4, 5, &BigInt::from(3)), BigInt::zero());
    }

    #[test]
    fn q_binomial_at_one_is_binomial() {
        let one = BigRational::one();
        for m in 0..7u64 {
            for l in 0..=m {
                let v = q_binomial_rat(m, l, &one);
                assert_eq!(v, BigRational::from_integer(BigInt::from(binomial(m, l))));
            }
        }
    }

    #[test]
    fn signed_binomial_negative_top() {
        assert_eq!(binomial_signed(-1, 0), BigInt::one());
        assert_eq!(binomial_signed(-1, 3), BigInt::from(-1));
        assert_eq!(binomial_signed(5, 2), BigInt::from(10));
        assert_eq!(binomial_signed(2, 3), BigInt::zero());
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power_parts(16), Some((2, 4)));
        assert_eq!(prime_power_parts(12), None);
        assert_eq!(prime_power_parts(1), None);
        assert_eq!(prime_powers_upto(13), vec![2, 3, 4, 5, 7, 8, 9, 11, 13]);
    }

    #[test]
    fn lcm_upto_values() {
        assert_eq!(lcm_upto(1), 1);
        assert_eq!(lcm_upto(3), 6);
        assert_eq!(lcm_upto(4), 12);
    }
}
