//! Exact sums of roots of unity `Σ c_a ζ_M^a` with rational coefficients.
//!
//! Values are kept as sparse exponent maps. Equality and integer extraction
//! reduce the difference to the smallest modulus `M'` that carries every
//! exponent and then take the remainder modulo the cyclotomic polynomial
//! `Φ_{M'}`; the power basis `1, ζ, …, ζ^{φ(M')-1}` makes that remainder unique.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Largest reduced modulus handled by exact reduction.
pub const MAX_EXACT_MODULUS: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicSum {
    modulus: u64,
    terms: BTreeMap<u64, BigRational>,
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i128>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i128>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_m`, low degree first.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<i128>> {
    if let Some(p) = phi_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    let poly = if m == 1 {
        vec![-1, 1]
    } else {
        // Φ_m = ∏_{d|m} (1 - t^d)^{μ(m/d)} as a power series truncated at φ(m).
        let deg = arith::euler_phi(m) as usize;
        let mut s = vec![0i128; deg + 1];
        s[0] = 1;
        for d in arith::divisors(m) {
            let mu = arith::moebius(m / d);
            let d = d as usize;
            if mu == 1 {
                for i in (d..=deg).rev() {
                    s[i] -= s[i - d];
                }
            } else if mu == -1 {
                for i in d..=deg {
                    s[i] += s[i - d];
                }
            }
        }
        s
    };
    let poly = Arc::new(poly);
    phi_cache().lock().unwrap().insert(m, poly.clone());
    poly
}

impl CyclotomicSum {
    pub fn zero(modulus: u64) -> Self {
        CyclotomicSum { modulus: modulus.max(1), terms: BTreeMap::new() }
    }

    pub fn from_rational(modulus: u64, c: BigRational) -> Self {
        let mut s = Self::zero(modulus);
        s.add_term(0, c);
        s
    }

    pub fn from_int(modulus: u64, c: i64) -> Self {
        Self::from_rational(modulus, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn one(modulus: u64) -> Self {
        Self::from_int(modulus, 1)
    }

    /// `ζ_M^a`.
    pub fn root(modulus: u64, a: u64) -> Self {
        let mut s = Self::zero(modulus);
        s.add_term(a, BigRational::one());
        s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&a, c)| (a, c))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exponent: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let a = exponent % self.modulus;
        let entry = self.terms.entry(a).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&a);
        }
    }

    /// Re-expresses the sum over modulus `l`, which must be a multiple of the current one.
    pub fn lift(&self, l: u64) -> Self {
        assert!(l % self.modulus == 0, "lift target must be a multiple");
        let f = l / self.modulus;
        CyclotomicSum {
            modulus: l,
            terms: self.terms.iter().map(|(&a, c)| (a * f, c.clone())).collect(),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.modulus == other.modulus {
            return (self.clone(), other.clone());
        }
        let l = arith::lcm(self.modulus, other.modulus);
        (self.lift(l), other.lift(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.modulus == other.modulus {
            let mut out = self.clone();
            for (&a, c) in &other.terms {
                out.add_term(a, c.clone());
            }
            return out;
        }
        let (a, b) = self.common(other);
        a.add(&b)
    }

    pub fn add_assign(&mut self, other: &Self) {
        if self.modulus == other.modulus {
            for (&a, c) in &other.terms {
                self.add_term(a, c.clone());
            }
        } else {
            *self = self.add(other);
        }
    }

    pub fn neg(&self) -> Self {
        CyclotomicSum {
            modulus: self.modulus,
            terms: self.terms.iter().map(|(&a, c)| (a, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.modulus != other.modulus {
            let (a, b) = self.common(other);
            return a.mul(&b);
        }
        let mut out = Self::zero(self.modulus);
        for (&a, c) in &self.terms {
            for (&b, d) in &other.terms {
                out.add_term(a + b, c * d);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.modulus);
        }
        CyclotomicSum {
            modulus: self.modulus,
            terms: self.terms.iter().map(|(&a, x)| (a, x * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Complex conjugate, `ζ^a ↦ ζ^{-a}`.
    pub fn conj(&self) -> Self {
        self.galois(self.modulus - 1)
    }

    /// `ζ ↦ ζ^j` applied term by term.
    pub fn galois(&self, j: u64) -> Self {
        let mut out = Self::zero(self.modulus);
        for (&a, c) in &self.terms {
            let e = ((a as u128 * j as u128) % self.modulus as u128) as u64;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Smallest modulus dividing `M` that carries every exponent.
    pub fn minimal_modulus(&self) -> u64 {
        let g = self.terms.keys().fold(self.modulus, |g, &a| arith::gcd(g, a));
        self.modulus / g.max(1)
    }

    /// Same value over its minimal modulus.
    pub fn compress(&self) -> Self {
        let m = self.minimal_modulus();
        let f = self.modulus / m;
        CyclotomicSum {
            modulus: m,
            terms: self.terms.iter().map(|(&a, c)| (a / f, c.clone())).collect(),
        }
    }

    /// Unique representative: compressed, then reduced modulo `Φ_{M'}`.
    pub fn canonical(&self) -> Result<Self> {
        let c = self.compress();
        let m = c.modulus;
        if m == 1 || c.terms.is_empty() {
            return Ok(c);
        }
        if m > MAX_EXACT_MODULUS {
            return Err(Error::ModulusTooLarge(m));
        }
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        // clear denominators, divide over Z
        let den = c.terms.values().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let mut dense: Vec<BigInt> = vec![BigInt::zero(); m as usize];
        for (&a, x) in &c.terms {
            dense[a as usize] = x.numer() * (&den / x.denom());
        }
        let phi_nz: Vec<(usize, BigInt)> = phi
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i, BigInt::from(v)))
            .collect();
        for top in (deg..m as usize).rev() {
            if dense[top].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut dense[top]);
            let shift = top - deg;
            for (i, v) in &phi_nz {
                if i + shift != top {
                    dense[i + shift] -= &lead * v;
                }
            }
        }
        let mut out = Self::zero(m);
        for (a, v) in dense.into_iter().enumerate().take(deg) {
            if !v.is_zero() {
                out.add_term(a as u64, BigRational::new(v, den.clone()));
            }
        }
        Ok(out.compress())
    }

    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        self.sub(other).is_zero_exact()
    }

    pub fn is_zero_exact(&self) -> Result<bool> {
        Ok(self.canonical()?.terms.is_empty())
    }

    /// The rational value, if the sum is rational.
    pub fn to_rational(&self) -> Result<Option<BigRational>> {
        let c = self.canonical()?;
        match c.terms.len() {
            0 => Ok(Some(BigRational::zero())),
            1 if c.terms.contains_key(&0) => Ok(c.terms.get(&0).cloned()),
            _ => Ok(None),
        }
    }

    pub fn to_integer(&self) -> Result<Option<BigInt>> {
        Ok(self.to_rational()?.and_then(|r| arith::rat_to_int(&r)))
    }

    /// Floating-point value together with an error bound `L1 · 2^-40`.
    pub fn to_complex(&self) -> (f64, f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        let mut l1 = 0.0;
        for (&a, c) in &self.terms {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = std::f64::consts::TAU * (a as f64) / (self.modulus as f64);
            re += v * angle.cos();
            im += v * angle.sin();
            l1 += v.abs();
        }
        (re, im, l1 * 2f64.powi(-40))
    }

    /// Display form: integers plainly, prime reduced moduli in the basis `ζ, …, ζ^{p-1}`,
    /// other moduli in the power basis.
    pub fn display_form(&self) -> Result<Self> {
        let c = self.canonical()?;
        let m = c.modulus;
        if m > 1 && arith::is_prime(m) {
            if let Some(c0) = c.terms.get(&0).cloned() {
                let mut out = c.clone();
                out.terms.remove(&0);
                for a in 1..m {
                    out.add_term(a, -c0.clone());
                }
                return Ok(out);
            }
        }
        Ok(c)
    }

    pub fn pretty(&self) -> String {
        let form = self.display_form().unwrap_or_else(|_| self.clone());
        format!("{form}")
    }

    pub fn to_json(&self) -> CyclotomicJson {
        let (re, im, _) = self.to_complex();
        CyclotomicJson {
            modulus: self.modulus,
            terms: self.terms.iter().map(|(&a, c)| (a, rat_string(c))).collect(),
            approx: Some([re, im]),
        }
    }

    pub fn from_json(j: &CyclotomicJson) -> Result<Self> {
        if j.modulus == 0 {
            return Err(Error::Parse("modulus must be positive".into()));
        }
        let mut out = Self::zero(j.modulus);
        for (a, c) in &j.terms {
            if *a >= j.modulus {
                return Err(Error::Parse(format!("exponent {a} out of range")));
            }
            out.add_term(*a, parse_rational(c)?);
        }
        Ok(out)
    }
}

pub fn rat_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational {s:?}"));
    if s.len() > 4096 {
        return Err(err());
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| err())?;
            let b: BigInt = b.trim().parse().map_err(|_| err())?;
            if b.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

/// Serialized form: `{modulus, terms: [[exponent, "coeff"], ...], approx: [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    pub modulus: u64,
    pub terms: Vec<(u64, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<[f64; 2]>,
}

impl CyclotomicJson {
    pub fn parse(text: &str) -> Result<CyclotomicSum> {
        let j: CyclotomicJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        CyclotomicSum::from_json(&j)
    }
}

impl fmt::Display for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&a, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let root = match a {
                0 => String::new(),
                1 => format!("ζ{}", self.modulus),
                _ => format!("ζ{}^{}", self.modulus, a),
            };
            if root.is_empty() {
                write!(f, "{}", rat_string(&mag))?;
            } else if mag.is_one() {
                write!(f, "{root}")?;
            } else {
                write!(f, "{}*{root}", rat_string(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicSum[{}]({self})", self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for m in [2u64, 3, 6, 7, 12, 63] {
            let mut s = CyclotomicSum::zero(m);
            for a in 0..m {
                s.add_term(a, r(1));
            }
            assert!(s.is_zero_exact().unwrap(), "m = {m}");
        }
    }

    #[test]
    fn gauss_period_of_seven() {
        // η = ζ+ζ²+ζ⁴ satisfies η² + η + 2 = 0
        let eta = CyclotomicSum::root(7, 1)
            .add(&CyclotomicSum::root(7, 2))
            .add(&CyclotomicSum::root(7, 4));
        let lhs = eta.mul(&eta).add(&eta).add(&CyclotomicSum::from_int(7, 2));
        assert!(lhs.is_zero_exact().unwrap());
        assert_eq!(eta.to_rational().unwrap(), None);
        // its conjugate is the other period
        let other = CyclotomicSum::root(7, 3)
            .add(&CyclotomicSum::root(7, 5))
            .add(&CyclotomicSum::root(7, 6));
        assert!(eta.conj().try_eq(&other).unwrap());
    }

    #[test]
    fn mixed_moduli_and_lifting() {
        // ζ_63^9 = ζ_7
        let a = CyclotomicSum::root(63, 9);
        let b = CyclotomicSum::root(7, 1);
        assert!(a.try_eq(&b).unwrap());
        assert_eq!(a.compress(), b);
        // ζ_4^2 = -1
        assert_eq!(CyclotomicSum::root(4, 2).to_integer().unwrap(), Some(BigInt::from(-1)));
    }

    #[test]
    fn rational_coefficients_and_extraction() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let s = CyclotomicSum::root(3, 1).add(&CyclotomicSum::root(3, 2)).scale(&half);
        assert_eq!(s.to_rational().unwrap(), Some(-half.clone()));
        assert_eq!(s.to_integer().unwrap(), None);
    }

    #[test]
    fn display_uses_prime_basis() {
        let other = CyclotomicSum::root(7, 3)
            .add(&CyclotomicSum::root(7, 5))
            .add(&CyclotomicSum::root(7, 6));
        assert_eq!(other.pretty(), "ζ7^3+ζ7^5+ζ7^6");
        assert_eq!(CyclotomicSum::from_int(7, -1).pretty(), "-1");
    }

    #[test]
    fn json_roundtrip() {
        let s = CyclotomicSum::root(8, 3).scale_int(-2).add(&CyclotomicSum::from_int(8, 5));
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(CyclotomicJson::parse(&text).unwrap(), s);
        assert!(CyclotomicJson::parse(r#"{"modulus":0,"terms":[]}"#).is_err());
        assert!(CyclotomicJson::parse(r#"{"modulus":3,"terms":[[5,"1"]]}"#).is_err());
        assert!(CyclotomicJson::parse(r#"{"modulus":3,"terms":[[1,"1/0"]]}"#).is_err());
    }

    #[test]
    fn numeric_value_matches() {
        let s = CyclotomicSum::root(8, 1).add(&CyclotomicSum::root(8, 7));
        let (re, im, bound) = s.to_complex();
        assert!((re - 2f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12);
        assert!(bound > 0.0);
    }
}
