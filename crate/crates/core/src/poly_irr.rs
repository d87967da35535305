//! Polynomials over `F_q`: arithmetic, irreducible enumeration, trial-division
//! factoring, companion matrices and rational canonical forms.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field_tower::Fq;
use crate::matrix_group::{ClassIndex, MatrixQ};

/// Largest `q^d` that [`enumerate_irreducibles`] will scan.
pub const ENUMERATION_BUDGET: u64 = 1 << 22;

/// Polynomial with `F_q` codes as coefficients, low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyQ(Vec<u32>);

impl PolyQ {
    pub fn from_coeffs(mut c: Vec<u32>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyQ(c)
    }

    pub fn zero() -> Self {
        PolyQ(Vec::new())
    }

    pub fn one() -> Self {
        PolyQ(vec![1])
    }

    /// `z - a` for an `F_q` code `a`.
    pub fn linear(fq: &Fq, a: u32) -> Self {
        PolyQ::from_coeffs(vec![fq.neg(a), 1])
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last() == Some(&1)
    }

    pub fn constant_term(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self, fq: &Fq) -> Self {
        let len = self.0.len().max(other.0.len());
        let c = (0..len)
            .map(|i| {
                fq.add(
                    self.0.get(i).copied().unwrap_or(0),
                    other.0.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        PolyQ::from_coeffs(c)
    }

    pub fn sub(&self, other: &Self, fq: &Fq) -> Self {
        let neg = PolyQ(other.0.iter().map(|&c| fq.neg(c)).collect());
        self.add(&neg, fq)
    }

    pub fn mul(&self, other: &Self, fq: &Fq) -> Self {
        if self.is_zero() || other.is_zero() {
            return PolyQ::zero();
        }
        let mut c = vec![0u32; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                c[i + j] = fq.add(c[i + j], fq.mul(a, b));
            }
        }
        PolyQ::from_coeffs(c)
    }

    pub fn pow(&self, k: u32, fq: &Fq) -> Self {
        (0..k).fold(PolyQ::one(), |acc, _| acc.mul(self, fq))
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &Self, fq: &Fq) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree();
        let lead_inv = fq.inv(*divisor.0.last().unwrap());
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (PolyQ::zero(), self.clone());
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            let factor = fq.mul(c, lead_inv);
            quot[k - dd] = factor;
            for (i, &dv) in divisor.0.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = fq.sub(rem[idx], fq.mul(factor, dv));
            }
        }
        rem.truncate(dd);
        (PolyQ::from_coeffs(quot), PolyQ::from_coeffs(rem))
    }

    pub fn eval(&self, x: u32, fq: &Fq) -> u32 {
        self.0.iter().rev().fold(0, |acc, &c| fq.add(fq.mul(acc, x), c))
    }

    /// Renders with `z` as the variable; coefficients are `F_q` codes.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{i}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}{mono}"),
            });
        }
        parts.join("+")
    }

    /// Parses either a JSON-style coefficient array `[1,1,1]` (low degree first)
    /// or text such as `z^3+2z+1`. Coefficients are `F_q` codes below `q`.
    pub fn parse(text: &str, q: u64) -> Result<Self> {
        let t = text.trim();
        let err = |m: &str| Error::Parse(format!("{m} in polynomial {t:?}"));
        if t.len() > 4096 {
            return Err(err("input too long"));
        }
        if t.starts_with('[') {
            let c: Vec<u64> = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            if c.iter().any(|&x| x >= q) {
                return Err(err("coefficient out of range"));
            }
            return Ok(PolyQ::from_coeffs(c.into_iter().map(|x| x as u32).collect()));
        }
        let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut coeffs: Vec<u64> = Vec::new();
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef, deg) = match term.find(['z', 'x']) {
                None => (term.parse::<u64>().map_err(|_| err("bad constant"))?, 0usize),
                Some(pos) => {
                    let head = term[..pos].trim_end_matches('*');
                    let c = if head.is_empty() {
                        1
                    } else {
                        head.parse::<u64>().map_err(|_| err("bad coefficient"))?
                    };
                    let tail = &term[pos + 1..];
                    let d = if tail.is_empty() {
                        1
                    } else if let Some(e) = tail.strip_prefix('^') {
                        e.parse::<usize>().map_err(|_| err("bad exponent"))?
                    } else {
                        return Err(err("unexpected characters"));
                    };
                    (c, d)
                }
            };
            if deg > 256 {
                return Err(err("degree too large"));
            }
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            coeffs[deg] += coef;
        }
        if coeffs.iter().any(|&x| x >= q) {
            return Err(err("coefficient out of range"));
        }
        Ok(PolyQ::from_coeffs(coeffs.into_iter().map(|x| x as u32).collect()))
    }
}

impl Ord for PolyQ {
    /// By degree, then lexicographically with the constant term first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PolyQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({})", self.to_text())
    }
}

/// All monic polynomials of degree `d`, in [`PolyQ`] order.
fn monic_of_degree(q: u64, d: usize) -> impl Iterator<Item = PolyQ> {
    let total = q.pow(d as u32);
    (0..total).map(move |k| {
        // constant term is the most significant digit so the order matches PolyQ::cmp
        let mut c = vec![0u32; d + 1];
        let mut r = k;
        for i in (0..d).rev() {
            c[i] = (r % q) as u32;
            r /= q;
        }
        c[d] = 1;
        PolyQ(c)
    })
}

type IrrCache = Mutex<HashMap<(u64, usize), Arc<Vec<PolyQ>>>>;

fn irr_cache() -> &'static IrrCache {
    static CACHE: OnceLock<IrrCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The set `𝓕_d(q)` of monic irreducibles of degree `d` other than `z`, sorted.
pub fn enumerate_irreducibles(fq: &Fq, d: usize) -> Result<Arc<Vec<PolyQ>>> {
    let q = fq.q();
    if d == 0 {
        return Ok(Arc::new(Vec::new()));
    }
    let fits = (q as u128).checked_pow(d as u32).map(|v| v <= ENUMERATION_BUDGET as u128);
    if fits != Some(true) {
        return Err(Error::EnumerationTooLarge(format!("{q}^{d}")));
    }
    if let Some(v) = irr_cache().lock().unwrap().get(&(q, d)) {
        return Ok(v.clone());
    }
    let mut smaller: Vec<PolyQ> = Vec::new();
    for e in 1..=d / 2 {
        smaller.extend(enumerate_irreducibles(fq, e)?.iter().cloned());
    }
    let list: Vec<PolyQ> = monic_of_degree(q, d)
        .filter(|f| f.constant_term() != 0)
        .filter(|f| smaller.iter().all(|g| !f.div_rem(g, fq).1.is_zero()))
        .collect();
    let list = Arc::new(list);
    irr_cache().lock().unwrap().insert((q, d), list.clone());
    Ok(list)
}

/// `#𝓕_m(q) = (1/m) Σ_{s|m} μ(m/s)(q^s - 1)`.
pub fn count_irreducibles(q: u64, m: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for s in arith::divisors(m) {
        acc += (arith::big_pow(q, s) - 1) * arith::moebius(m / s);
    }
    acc / BigInt::from(m)
}

pub fn is_irreducible(fq: &Fq, f: &PolyQ) -> Result<bool> {
    if !f.is_monic() || f.degree() == 0 || f.constant_term() == 0 {
        return Ok(false);
    }
    Ok(enumerate_irreducibles(fq, f.degree())?.binary_search(f).is_ok())
}

/// Factors a monic polynomial with nonzero constant term into irreducibles
/// with multiplicities, in [`PolyQ`] order.
pub fn factor_poly(fq: &Fq, p: &PolyQ) -> Result<Vec<(PolyQ, u32)>> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    if p.constant_term() == 0 {
        return Err(Error::ZeroConstantTerm);
    }
    let mut rest = p.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while 2 * d <= rest.degree() {
        for f in enumerate_irreducibles(fq, d)?.iter() {
            let mut mult = 0;
            loop {
                let (quot, rem) = rest.div_rem(f, fq);
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                mult += 1;
            }
            if mult > 0 {
                out.push((f.clone(), mult));
            }
        }
        d += 1;
    }
    if rest.degree() > 0 {
        out.push((rest, 1));
    }
    out.sort();
    Ok(out)
}

pub fn is_squarefree(fq: &Fq, p: &PolyQ) -> Result<bool> {
    Ok(factor_poly(fq, p)?.iter().all(|&(_, m)| m == 1))
}

/// Companion matrix: ones on the subdiagonal, last column `-h_0, …, -h_{m-1}`.
pub fn companion_matrix(fq: &Fq, h: &PolyQ) -> Result<MatrixQ> {
    if !h.is_monic() {
        return Err(Error::NotMonic);
    }
    let m = h.degree();
    let mut a = MatrixQ::zero(m);
    for i in 1..m {
        a.set(i, i - 1, 1);
    }
    for i in 0..m {
        a.set(i, m - 1, fq.neg(h.coeffs()[i]));
    }
    Ok(a)
}

/// Block-diagonal rational canonical form with blocks `A(f^{λ_i})`, larger blocks first.
pub fn rcf_from_index(fq: &Fq, idx: &ClassIndex, n: usize) -> Result<MatrixQ> {
    let norm = idx.norm();
    if norm != n {
        return Err(Error::NormMismatch { expected: n as u64, found: norm as u64 });
    }
    let mut blocks: Vec<(usize, PolyQ, u32)> = Vec::new();
    for (f, lam) in idx.entries() {
        for &part in lam.parts() {
            blocks.push((f.degree() * part as usize, f.clone(), part));
        }
    }
    blocks.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)).then_with(|| b.2.cmp(&a.2)));
    let mut g = MatrixQ::zero(n);
    let mut offset = 0;
    for (size, f, part) in blocks {
        let block = companion_matrix(fq, &f.pow(part, fq))?;
        for i in 0..size {
            for j in 0..size {
                g.set(offset + i, offset + j, block.get(i, j));
            }
        }
        offset += size;
    }
    Ok(g)
}
