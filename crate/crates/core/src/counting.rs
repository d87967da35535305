//! Counting ordered factorizations into regular elliptic elements: the
//! Frobenius character sum, the closed formulas, probabilities and limit
//! reports, and quasipolynomial fitting over prime powers.
//!
//! Closed formulas are exact rational arithmetic throughout. Integrality of a
//! final count is asserted and reported as [`Error::InexactResult`] otherwise.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cyclotomic::{rat_string, CyclotomicSum};
use crate::error::{Error, Result};
use crate::field_tower::{FieldCtx, PrimePower};
use crate::green_chars::{deg_ndr, deg_ndr_rat, primary_on_rss, GreenCtx};
use crate::matrix_group::{ct_box_size, gamma_n, ClassIndex};
use crate::partitions_sym::{class_size_sn, mn_character, stanley_count, Partition};
use crate::poly_irr::{count_irreducibles, enumerate_irreducibles, PolyQ};

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn qr(q: u64) -> BigRational {
    rat(q)
}

fn require_int(x: BigRational, what: impl FnOnce() -> String) -> Result<BigInt> {
    arith::rat_to_int(&x).ok_or_else(|| Error::InexactResult(what()))
}

/// `γ_n(q) = #GL_n(F_q)` as a rational.
pub fn gamma_rat(q: &BigRational, n: u64) -> BigRational {
    let tri = (n * n.saturating_sub(1) / 2) as i64;
    arith::rat_pow(q, tri)
        * arith::rat_pow(&(q - BigRational::one()), n as i64)
        * (1..=n).fold(BigRational::one(), |acc, i| acc * arith::q_int_rat(i, q))
}

/// `P_{n,k}(q)`.
pub fn p_nk(q: u64, n: u64, k: u64) -> BigRational {
    let g = gamma_rat(&qr(q), n);
    let qn1 = rat(arith::big_pow(q, n) - 1);
    let inner = g.clone() * rat(arith::sign_pow(n as i64)) / (rat(n) * qn1);
    arith::rat_pow(&inner, k as i64) / g
}

/// `D_{n,k,d}(q)`.
pub fn d_nkd(q: u64, n: u64, k: u64, d: u64) -> Result<BigRational> {
    if d == 0 || n % d != 0 {
        return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
    }
    let mut acc = BigRational::zero();
    for r in 0..n / d {
        let deg = deg_ndr(q, n, d, r)?;
        acc += arith::rat_pow(&deg, 2 - k as i64) * rat(arith::sign_pow((r * k) as i64));
    }
    Ok(acc)
}

/// `C_{n,k,c}(q)`, with the lcm taken over plain integers.
pub fn c_nkc(q: u64, n: u64, k: u64, c: u64) -> Result<BigInt> {
    if c == 0 || n % c != 0 {
        return Err(Error::DivisibilityViolation(format!("{c} does not divide {n}")));
    }
    let qn1: BigInt = arith::big_pow(q, n) - 1;
    let base: BigInt = &qn1 / (arith::big_pow(q, c) - 1);
    let divs: Vec<(BigInt, i64)> = arith::divisors(n)
        .into_iter()
        .filter_map(|s| {
            let m = arith::moebius(n / s);
            (m != 0).then(|| (arith::big_pow(q, s) - 1, m))
        })
        .collect();
    let mut total = BigInt::zero();
    let mut idx = vec![0usize; k as usize];
    loop {
        let mut num = qn1.clone();
        let mut l = base.clone();
        for &i in &idx {
            num *= &divs[i].0 * divs[i].1;
            l = l.lcm(&divs[i].0);
        }
        total += num / l;
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < divs.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The entries of the formula table at one `(q, n, k, d, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1 {
    pub gamma: BigRational,
    pub p_nk: BigRational,
    /// `deg_{n,d,r}(q)` for `r = 0..n/d`.
    pub deg_ndr: Vec<BigRational>,
    pub d_nkd: BigRational,
    pub c_nkc: BigRational,
}

pub fn table1(q: u64, n: u64, k: u64, d: u64, c: u64) -> Result<Table1> {
    if d == 0 || n % d != 0 || c == 0 || d % c != 0 {
        return Err(Error::DivisibilityViolation(format!("need c | d | n, got c={c} d={d} n={n}")));
    }
    Ok(Table1 {
        gamma: gamma_rat(&qr(q), n),
        p_nk: p_nk(q, n, k),
        deg_ndr: (0..n / d).map(|r| deg_ndr(q, n, d, r)).collect::<Result<_>>()?,
        d_nkd: d_nkd(q, n, k, d)?,
        c_nkc: rat(c_nkc(q, n, k, c)?),
    })
}

/// `#CT_(n)(q)`.
pub fn ct_n_size(q: u64, n: u64) -> BigInt {
    gamma_n(q, n) / (arith::big_pow(q, n) - 1) * count_irreducibles(q, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedReMain,
    ClosedNMinus1,
    ClosedNuN,
    Frobenius,
    Brute,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "closed_re_main" => Ok(Method::ClosedReMain),
            "closed_n_minus_1" => Ok(Method::ClosedNMinus1),
            "closed_nu_n" => Ok(Method::ClosedNuN),
            "frobenius" => Ok(Method::Frobenius),
            "brute" => Ok(Method::Brute),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

mod big_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub n: u32,
    pub k: u32,
    pub mu: Partition,
    pub q: u64,
    #[serde(with = "big_string")]
    pub value: BigInt,
    pub method: Method,
    #[serde(rename = "box")]
    pub box_count: bool,
}

impl CountResult {
    fn new(q: u64, k: u32, mu: &Partition, value: BigInt, method: Method, box_count: bool) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InexactResult(format!("negative count {value}")));
        }
        Ok(CountResult { n: mu.size(), k, mu: mu.clone(), q, value, method, box_count })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `μ_{ℓ-1} > μ_ℓ = 1` with `ℓ > 1` and `n > 2`.
pub fn re_main_applies(mu: &Partition) -> bool {
    let p = mu.parts();
    mu.size() > 2 && p.len() > 1 && p[p.len() - 1] == 1 && p[p.len() - 2] > 1
}

/// `Σ_r (-1)^{rk} χ^{hook r}_μ / (q^{C(r+1,2)} [n-1, r]_q)^{k-1}` at a rational `q`.
pub fn re_main_ratio(q: &BigRational, k: u32, mu: &Partition) -> Result<BigRational> {
    let n = mu.size();
    let mut acc = BigRational::zero();
    for r in 0..n {
        let chi = mn_character(&Partition::hook(n, r), mu)?;
        if chi == 0 {
            continue;
        }
        let den = arith::rat_pow(q, (r * (r + 1) / 2) as i64) * arith::q_binomial_rat(n as u64 - 1, r as u64, q);
        acc += rat(chi * arith::sign_pow(r as i64 * k as i64)) / arith::rat_pow(&den, k as i64 - 1);
    }
    Ok(acc)
}

/// `g^□_{k,μ}(q)` by the hook-sum closed form.
pub fn closed_re_main(q: u64, n: u32, k: u32, mu: &Partition) -> Result<CountResult> {
    if mu.size() != n {
        return Err(Error::SizeMismatch(format!("{mu} is not a partition of {n}")));
    }
    if !re_main_applies(mu) {
        return Err(Error::HypothesisViolation(format!(
            "need n > 2 and μ_(ℓ-1) > μ_ℓ = 1, got {mu}"
        )));
    }
    let ct = rat(ct_n_size(q, n as u64));
    let value = arith::rat_pow(&ct, k as i64) * rat(ct_box_size(q, mu)) / rat(gamma_n(q, n as u64))
        * re_main_ratio(&qr(q), k, mu)?;
    let value = require_int(value, || format!("g□_{{{k},{mu}}}({q})"))?;
    CountResult::new(q, k, mu, value, Method::ClosedReMain, !mu.has_distinct_parts())
}

/// `g_{k,(n-1,1)}(q)`.
pub fn closed_n_minus_1(q: u64, n: u32, k: u32) -> Result<CountResult> {
    if n <= 2 {
        return Err(Error::HypothesisViolation(format!("need n > 2, got {n}")));
    }
    let mu = Partition::new(vec![n - 1, 1]);
    let ct = rat(ct_n_size(q, n as u64));
    let e = (n as i64 * (n as i64 - 1) / 2) * (k as i64 - 1);
    let sign = arith::sign_pow(n as i64 * k as i64 - n as i64 - k as i64);
    let factor = BigRational::one() + rat(sign) / arith::rat_pow(&qr(q), e);
    let value = arith::rat_pow(&ct, k as i64) * rat(ct_box_size(q, &mu)) / rat(gamma_n(q, n as u64)) * factor;
    let value = require_int(value, || format!("g_{{{k},{mu}}}({q})"))?;
    CountResult::new(q, k, &mu, value, Method::ClosedNMinus1, false)
}

/// `g_{k,(n)}(q)` by the nested divisor-sum formula.
pub fn closed_nu_n(q: u64, n: u32, k: u32) -> Result<CountResult> {
    let value = closed_nu_n_value(q, n as u64, k as u64)?;
    CountResult::new(q, k, &Partition::new(vec![n]), value, Method::ClosedNuN, false)
}

fn closed_nu_n_value(q: u64, n: u64, k: u64) -> Result<BigInt> {
    if n == 0 || k == 0 {
        return Err(Error::RangeError("need n, k ≥ 1".into()));
    }
    let kk = k + 1;
    let mut outer = BigRational::zero();
    for d in arith::divisors(n) {
        let mut inner = BigInt::zero();
        for c in arith::divisors(d) {
            let m = arith::moebius(d / c);
            if m != 0 {
                inner += c_nkc(q, n, kk, c)? * m;
            }
        }
        let sign = arith::sign_pow((n * kk / d) as i64);
        outer += d_nkd(q, n, kk, d)? * rat(inner * arith::big_pow(d, k) * sign);
    }
    require_int(p_nk(q, n, kk) * outer, || format!("g_{{{k},({n})}}({q})"))
}

/// `#{f ∈ 𝓕_d(q) : b | ℓ_f [n/d]_{q^d}}`.
pub fn count_irr_div(q: u64, n: u64, d: u64, b: &BigInt) -> Result<BigInt> {
    let qn1: BigInt = arith::big_pow(q, n) - 1;
    if d == 0 || n % d != 0 {
        return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
    }
    if !b.is_positive() || !(&qn1 % b).is_zero() {
        return Err(Error::DivisibilityViolation(format!("{b} does not divide {qn1}")));
    }
    let mut acc = BigInt::zero();
    for c in arith::divisors(d) {
        let m = arith::moebius(d / c);
        if m == 0 {
            continue;
        }
        let bracket = arith::q_int(n / c, &arith::big_pow(q, c));
        acc += &qn1 / bracket.lcm(b) * m;
    }
    let (quot, rem) = acc.div_rem(&BigInt::from(d));
    if !rem.is_zero() {
        return Err(Error::InexactResult(format!("count_irr_div({q},{n},{d},{b})")));
    }
    Ok(quot)
}

/// `(1/d) Σ_{c|d} μ(d/c) C_{n,k,c}(q)`.
pub fn char_sum_power_identity(q: u64, n: u64, d: u64, k: u64) -> Result<BigRational> {
    if d == 0 || n % d != 0 {
        return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
    }
    let mut acc = BigInt::zero();
    for c in arith::divisors(d) {
        let m = arith::moebius(d / c);
        if m != 0 {
            acc += c_nkc(q, n, k, c)? * m;
        }
    }
    Ok(BigRational::new(acc, BigInt::from(d)))
}

/// `e(n, d, r)`, the `q`-degree of `deg_{n,d,r}`.
pub fn e_exponent(n: u64, d: u64, r: u64) -> Result<i64> {
    if d == 0 || n % d != 0 || r >= n / d {
        return Err(Error::RangeError(format!("e({n},{d},{r})")));
    }
    let (n, d, r) = (n as i64, d as i64, r as i64);
    let m = n / d;
    Ok(d * (r * (r + 1) / 2) + n * (n + 1) / 2 - d * (m * (m + 1) / 2) + d * r * (m - 1 - r))
}

/// Sets of distinct irreducibles whose degrees list `μ`, i.e. the regular
/// semisimple classes of cycle type `μ`.
pub fn rss_classes(field: &FieldCtx, mu: &Partition) -> Result<Vec<Vec<PolyQ>>> {
    let mut out: Vec<Vec<PolyQ>> = vec![Vec::new()];
    for (deg, mult) in mu.multiplicities() {
        let polys = enumerate_irreducibles(&field.fq, deg as usize)?;
        let mut subsets = Vec::new();
        choose(&polys, mult as usize, 0, &mut Vec::new(), &mut subsets);
        let mut next = Vec::with_capacity(out.len() * subsets.len());
        for prefix in &out {
            for s in &subsets {
                let mut v = prefix.clone();
                v.extend(s.iter().cloned());
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}

fn choose(items: &[PolyQ], k: usize, start: usize, cur: &mut Vec<PolyQ>, out: &mut Vec<Vec<PolyQ>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        cur.push(items[i].clone());
        choose(items, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Character sums over cycle-type sets and the Frobenius count, tied to one field context.
pub struct Counter {
    pub field: Arc<FieldCtx>,
    green: OnceLock<Arc<GreenCtx>>,
}

impl Counter {
    pub fn new(q: u64, n: u32) -> Result<Self> {
        Ok(Self::from_field(Arc::new(FieldCtx::new(q, n)?)))
    }

    pub fn from_field(field: Arc<FieldCtx>) -> Self {
        Counter { field, green: OnceLock::new() }
    }

    pub fn with_green(green: Arc<GreenCtx>) -> Self {
        let c = Counter { field: green.field.clone(), green: OnceLock::new() };
        let _ = c.green.set(green);
        c
    }

    pub fn green(&self) -> Arc<GreenCtx> {
        self.green.get_or_init(|| Arc::new(GreenCtx::new(self.field.clone()))).clone()
    }

    fn n(&self) -> u64 {
        self.field.n as u64
    }

    fn q(&self) -> u64 {
        self.field.q()
    }

    /// `Σ_{g ∈ CT_(n)} χ^{f,r}(g)` from the root-of-unity divisibility lemma.
    pub fn char_sum_reg_elliptic(&self, f: &PolyQ, r: u32) -> Result<BigInt> {
        let (n, q) = (self.n(), self.q());
        let d = f.degree() as u64;
        if d == 0 || n % d != 0 {
            return Err(Error::DivisibilityViolation(format!("deg f = {d} does not divide {n}")));
        }
        if r as u64 >= n / d {
            return Err(Error::RangeError(format!("r = {r} ≥ n/d = {}", n / d)));
        }
        let qn1: BigInt = arith::big_pow(q, n) - 1;
        let power = (BigInt::from(self.field.ell_of(f)?) * arith::q_int(n / d, &arith::big_pow(q, d))) % &qn1;
        let mut delta_sum = BigInt::zero();
        for s in arith::divisors(n) {
            let m = arith::moebius(n / s);
            let qs1: BigInt = arith::big_pow(q, s) - 1;
            if m != 0 && (&power % &qs1).is_zero() {
                delta_sum += qs1 * m;
            }
        }
        let sign = arith::sign_pow(((n / d) * (d - 1) + r as u64) as i64);
        let value = rat(gamma_n(q, n) / qn1 * delta_sum * sign) * BigRational::new(BigInt::from(d), BigInt::from(n));
        require_int(value, || format!("Σ χ^{{{f},{r}}} over CT_({n})"))
    }

    /// `Σ_{h ∈ CT^□_μ} χ^{f,r}(h)` class by class from the root-sum formula.
    pub fn char_sum_ct_box(&self, f: &PolyQ, r: u32, mu: &Partition) -> Result<CyclotomicSum> {
        let n = self.n();
        let d = f.degree() as u64;
        if d == 0 || n % d != 0 || mu.size() as u64 != n {
            return Err(Error::DivisibilityViolation(format!("deg f = {d}, |μ| = {}, n = {n}", mu.size())));
        }
        let modulus = self.field.m;
        if mu.parts().iter().any(|&p| p as u64 % d != 0) {
            return Ok(CyclotomicSum::zero(modulus));
        }
        let lam = Partition::hook((n / d) as u32, r);
        let mut acc = CyclotomicSum::zero(modulus);
        for set in rss_classes(&self.field, mu)? {
            let idx = ClassIndex::from_pairs(set.into_iter().map(|h| (h, Partition::new(vec![1]))).collect());
            acc.add_assign(&primary_on_rss(&self.field, f, &lam, &idx)?);
        }
        let size = mu.parts().iter().fold(gamma_n(self.q(), n), |g, &p| g / (arith::big_pow(self.q(), p as u64) - 1));
        Ok(acc.scale(&rat(size)).compress())
    }

    /// `Σ_{h ∈ CT_μ} χ^{f,r}(h)` over every class, using the brute-force character table.
    pub fn char_sum_ct_full(&self, f: &PolyQ, r: u32, mu: &Partition) -> Result<CyclotomicSum> {
        let green = self.green();
        let n = self.n() as usize;
        let data = green.group(n).map_err(|e| match e {
            Error::GroupTooLarge(s) => Error::UnsupportedTarget(format!(
                "non-squarefree cycle type {mu} needs the full character table; group order {s} exceeds the brute-force budget"
            )),
            other => other,
        })?;
        let d = f.degree() as u32;
        let chi = green.chi(&ClassIndex::primary(f.clone(), Partition::hook(n as u32 / d, r)))?;
        let mut acc = CyclotomicSum::zero(self.field.m);
        for (c, idx) in data.classes.iter().enumerate() {
            if &idx.cycle_type() == mu {
                acc.add_assign(&chi[c].scale(&rat(data.sizes[c].clone())));
            }
        }
        Ok(acc.compress())
    }

    /// `g_{k,μ}(q)` (or the box count) by Frobenius' character sum.
    pub fn frobenius_count(&self, k: u32, mu: &Partition, box_count: bool) -> Result<CountResult> {
        let (n, q) = (self.n(), self.q());
        if mu.size() as u64 != n {
            return Err(Error::SizeMismatch(format!("{mu} is not a partition of {n}")));
        }
        // CT_μ = CT^□_μ when the parts are distinct
        let use_box = box_count || mu.has_distinct_parts();
        let mut acc = CyclotomicSum::zero(1);
        for d in arith::divisors(n) {
            // vanishing off d | μ holds on regular semisimple classes only
            let divides = mu.parts().iter().all(|&p| p as u64 % d == 0);
            if use_box && !divides {
                continue;
            }
            for f in enumerate_irreducibles(&self.field.fq, d as usize)?.iter() {
                for r in 0..(n / d) as u32 {
                    let s_re = self.char_sum_reg_elliptic(f, r)?;
                    if s_re.is_zero() {
                        continue;
                    }
                    let s_mu = if use_box {
                        self.char_sum_ct_box(f, r, mu)?
                    } else {
                        self.char_sum_ct_full(f, r, mu)?
                    };
                    if s_mu.is_structurally_zero() {
                        continue;
                    }
                    let coef = arith::rat_pow(&deg_ndr(q, n, d, r as u64)?, 1 - k as i64)
                        * arith::rat_pow(&rat(s_re), k as i64);
                    acc.add_assign(&s_mu.scale(&coef));
                }
            }
        }
        let total = acc
            .to_rational()?
            .ok_or_else(|| Error::InexactResult(format!("Frobenius sum for {mu} is irrational")))?;
        let value = total / rat(gamma_n(q, n));
        let value = require_int(value, || format!("Frobenius g_{{{k},{mu}}}({q})"))
            .map_err(|e| match e {
                Error::InexactResult(s) => Error::InexactDivision(s),
                other => other,
            })?;
        CountResult::new(q, k, mu, value, Method::Frobenius, box_count && !mu.has_distinct_parts())
    }

    /// `Σ_{f ∈ 𝓕_d} (Σ_{p ∈ 𝓕_n} Σ_{p(α)=0} θ(α)^{ℓ_f [n/d]})^k` summed root by root.
    pub fn char_sum_power_direct(&self, d: u64, k: u64) -> Result<BigRational> {
        let (n, q) = (self.n(), self.q());
        if d == 0 || n % d != 0 {
            return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
        }
        let modulus = self.field.m;
        let bracket = arith::q_int(n / d, &arith::big_pow(q, d)) % BigInt::from(modulus);
        let bracket: u64 = bracket.try_into().expect("reduced");
        let mut roots = Vec::new();
        for p in enumerate_irreducibles(&self.field.fq, n as usize)?.iter() {
            let base = self.field.subfield_power(n, self.field.ell_of(p)?);
            for j in 0..n {
                roots.push(mulmod(base, arith::mod_pow(q, j, modulus), modulus));
            }
        }
        let mut total = CyclotomicSum::zero(1);
        for f in enumerate_irreducibles(&self.field.fq, d as usize)?.iter() {
            let pw = mulmod(self.field.ell_of(f)?, bracket, modulus);
            let mut s = CyclotomicSum::zero(modulus);
            for &a in &roots {
                s.add_term(mulmod(a, pw, modulus), BigRational::one());
            }
            total.add_assign(&s.compress().pow(k));
        }
        total.to_rational()?.ok_or_else(|| Error::InexactResult("power sum is irrational".into()))
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Picks the cheapest exact method available for `(q, μ, box)`.
pub fn count_auto(q: u64, k: u32, mu: &Partition, box_count: bool) -> Result<CountResult> {
    PrimePower::new(q)?;
    let n = mu.size();
    if mu.parts() == [n] {
        return closed_nu_n(q, n, k);
    }
    if n > 2 && mu.parts() == [n - 1, 1] {
        return closed_n_minus_1(q, n, k);
    }
    if re_main_applies(mu) && (box_count || mu.has_distinct_parts()) {
        return closed_re_main(q, n, k, mu);
    }
    Counter::new(q, n)?.frobenius_count(k, mu, box_count)
}

/// `p_{k,μ}(q)` or `p^□_{k,μ}(q)`.
pub fn prob(q: u64, k: u32, mu: &Partition, box_count: bool) -> Result<(BigRational, CountResult)> {
    if k == 0 {
        return Err(Error::RangeError("k ≥ 1".into()));
    }
    let res = count_auto(q, k, mu, box_count)?;
    let den = num_traits::pow(ct_n_size(q, mu.size() as u64), k as usize);
    Ok((BigRational::new(res.value.clone(), den), res))
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub q: u64,
    #[serde(serialize_with = "ser_rat")]
    pub p: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub target: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub abs_diff: BigRational,
    pub abs_diff_approx: f64,
    #[serde(rename = "box")]
    pub box_count: bool,
    pub method: Method,
}

fn ser_rat<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(v))
}

/// True when a non-box closed formula covers `μ`.
pub fn has_closed_form(mu: &Partition) -> bool {
    let n = mu.size();
    mu.parts() == [n] || (re_main_applies(mu) && mu.has_distinct_parts())
}

/// `|p_{k,μ}(q) - 1/z_μ|` over the given `q`; uses box probabilities where no closed formula exists.
pub fn limit_report(k: u32, mu: &Partition, q_list: &[u64]) -> Result<Vec<LimitRow>> {
    let box_count = !has_closed_form(mu);
    let target = BigRational::new(BigInt::one(), BigInt::from(mu.z()));
    q_list
        .iter()
        .map(|&q| {
            let (p, res) = prob(q, k, mu, box_count)?;
            let diff = (&p - &target).abs();
            Ok(LimitRow {
                q,
                abs_diff_approx: rat_to_f64(&diff),
                p,
                target: target.clone(),
                abs_diff: diff,
                box_count,
                method: res.method,
            })
        })
        .collect()
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dense polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn constant(c: BigRational) -> Self {
        RatPoly(vec![c]).trimmed()
    }

    /// `x - a`.
    pub fn linear(a: i64) -> Self {
        RatPoly(vec![rat(-a), BigRational::one()])
    }

    /// From integer coefficients, lowest degree first.
    pub fn from_ints(c: &[i64]) -> Self {
        RatPoly(c.iter().map(|&x| rat(x)).collect()).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut v = vec![BigRational::zero(); self.0.len().max(o.0.len())];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in o.0.iter().enumerate() {
            v[i] += c;
        }
        RatPoly(v).trimmed()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return RatPoly::default();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        RatPoly(v).trimmed()
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(RatPoly::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatPoly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Exact interpolation through the given points (Newton form, then expanded).
    pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Self {
        let m = xs.len();
        let mut coef = ys.to_vec();
        for j in 1..m {
            for i in (j..m).rev() {
                coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
            }
        }
        let mut poly = RatPoly::default();
        for i in (0..m).rev() {
            poly = poly.mul(&RatPoly(vec![-xs[i].clone(), BigRational::one()]));
            poly = poly.add(&RatPoly::constant(coef[i].clone()));
        }
        poly
    }

    pub fn coefficient_strings(&self) -> Vec<String> {
        self.0.iter().map(rat_string).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Polynomial,
    NonPolynomial,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub n: u32,
    pub k: u32,
    pub residue: u64,
    pub samples: Vec<u64>,
    #[serde(serialize_with = "ser_poly")]
    pub coefficients: RatPoly,
    pub verdict: Verdict,
    pub witness: Option<u64>,
}

fn ser_poly<S: serde::Serializer>(v: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.0.len()))?;
    for c in &v.0 {
        seq.serialize_element(&rat_string(c))?;
    }
    seq.end()
}

pub fn default_degree_bound(n: u32, k: u32) -> usize {
    (n * n * (k + 1)) as usize
}

/// The first `count` prime powers `≡ residue (mod n)` in ascending order.
///
/// If `gcd(residue, n) > 1` only powers of primes dividing `n` qualify, so the
/// list can be short; callers see that as [`Error::InsufficientSamples`].
pub fn sample_prime_powers(n: u64, residue: u64, count: usize) -> Vec<u64> {
    const SCAN_LIMIT: u64 = 2_000_000;
    let residue = residue % n;
    let mut found = Vec::new();
    for (p, _) in arith::factorize(n) {
        let mut pw = p as u128;
        while pw < (1u128 << 62) {
            if pw as u64 % n == residue {
                found.push(pw as u64);
            }
            pw *= p as u128;
        }
    }
    if arith::gcd(residue, n) == 1 {
        let mut hits = 0;
        let mut q = if residue >= 2 { residue } else { residue + n };
        while q <= SCAN_LIMIT && hits < count {
            if q >= 2 && arith::prime_power_parts(q).is_some() {
                found.push(q);
                hits += 1;
            }
            q += n;
        }
    }
    found.sort_unstable();
    found.dedup();
    found.truncate(count);
    found
}

/// Fits `g_{k,(n)}(q)` on prime powers `q ≡ residue (mod n)`.
pub fn quasipoly_fit(
    n: u32,
    k: u32,
    residue: u64,
    samples: Option<Vec<u64>>,
    degree_bound: Option<usize>,
) -> Result<FitReport> {
    let bound = degree_bound.unwrap_or_else(|| default_degree_bound(n, k));
    let needed = bound + 2;
    let samples = match samples {
        Some(s) => {
            if let Some(bad) = s.iter().find(|&&q| q % n as u64 != residue % n as u64) {
                return Err(Error::HypothesisViolation(format!("{bad} is not ≡ {residue} mod {n}")));
            }
            if let Some(bad) = s.iter().find(|&&q| arith::prime_power_parts(q).is_none()) {
                return Err(Error::NotPrimePower(*bad));
            }
            s
        }
        None => sample_prime_powers(n as u64, residue, needed),
    };
    if samples.len() < needed {
        return Err(Error::InsufficientSamples { needed, got: samples.len() });
    }
    let values = samples
        .iter()
        .map(|&q| closed_nu_n_value(q, n as u64, k as u64).map(rat))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<BigRational> = samples.iter().map(|&q| qr(q)).collect();
    let poly = RatPoly::interpolate(&xs[..bound + 1], &values[..bound + 1]);
    let witness = (bound + 1..samples.len()).find(|&i| poly.eval(&xs[i]) != values[i]).map(|i| samples[i]);
    Ok(FitReport {
        n,
        k,
        residue: residue % n as u64,
        samples,
        coefficients: poly,
        verdict: if witness.is_some() { Verdict::NonPolynomial } else { Verdict::Polynomial },
        witness,
    })
}

/// Compares the `q = 1` value of the normalized hook-sum ratio with the `S_n` count.
pub fn q_to_1_check(n: u32, k: u32, mu: &Partition) -> Result<bool> {
    if mu.size() != n {
        return Err(Error::SizeMismatch(format!("{mu} is not a partition of {n}")));
    }
    if !re_main_applies(mu) {
        return Err(Error::HypothesisViolation(format!("{mu} violates μ_(ℓ-1) > μ_ℓ = 1 or n > 2")));
    }
    let lhs = re_main_ratio(&BigRational::one(), k, mu)?;
    let cn = rat(BigInt::from(arith::factorial(n as u64 - 1)));
    let g = rat(stanley_count(n, k, mu)?);
    let rhs = (g / arith::rat_pow(&cn, k as i64))
        / (rat(BigInt::from(class_size_sn(mu))) / rat(BigInt::from(arith::factorial(n as u64))));
    Ok(lhs == rhs)
}

/// `deg_{n,d,r}` at rational `q`; re-exported for sweeps.
pub fn deg_ndr_at(q: &BigRational, n: u64, d: u64, r: u64) -> Result<BigRational> {
    deg_ndr_rat(q, n, d, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn table1_trivial_rows() {
        assert_eq!(gamma_rat(&qr(2), 3), rat(168));
        for (q, n) in [(2u64, 3u64), (3, 4), (4, 2)] {
            for d in arith::divisors(n) {
                assert_eq!(d_nkd(q, n, 2, d).unwrap(), rat(n / d));
            }
        }
        assert!(table1(2, 3, 2, 2, 1).is_err());
        assert!(table1(2, 4, 2, 2, 1).is_ok());
    }

    #[test]
    fn closed_examples() {
        assert_eq!(closed_nu_n(2, 3, 2).unwrap().value, BigInt::from(576));
        assert_eq!(closed_nu_n(2, 2, 2).unwrap().value, BigInt::from(2));
        assert_eq!(closed_re_main(2, 3, 2, &pt(&[2, 1])).unwrap().value, BigInt::from(672));
        assert_eq!(closed_n_minus_1(2, 3, 2).unwrap().value, BigInt::from(672));
        assert_eq!(closed_re_main(2, 3, 1, &pt(&[2, 1])).unwrap().value, BigInt::zero());
        assert_eq!(closed_n_minus_1(5, 4, 1).unwrap().value, BigInt::zero());
        assert!(matches!(closed_re_main(2, 3, 2, &pt(&[1, 1, 1])), Err(Error::HypothesisViolation(_))));
        assert!(matches!(closed_n_minus_1(2, 2, 2), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn nu_n_at_k1_is_ct_size() {
        for q in [2u64, 3, 4, 5, 7] {
            for n in 1..=4u32 {
                assert_eq!(closed_nu_n(q, n, 1).unwrap().value, ct_n_size(q, n as u64), "q={q} n={n}");
                assert_eq!(ct_box_size(q, &pt(&[n])), ct_n_size(q, n as u64));
            }
        }
    }

    #[test]
    fn closed_formulas_are_integral_on_a_grid() {
        let mut checked = 0;
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
            for n in 2..=4u32 {
                for k in 1..=4u32 {
                    closed_nu_n(q, n, k).unwrap();
                    if n > 2 {
                        closed_n_minus_1(q, n, k).unwrap();
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked >= 30);
    }

    #[test]
    fn count_irr_div_examples() {
        for (q, n) in [(2u64, 3u64), (3, 4), (2, 4), (4, 2)] {
            for d in arith::divisors(n) {
                assert_eq!(count_irr_div(q, n, d, &BigInt::one()).unwrap(), count_irreducibles(q, d));
            }
        }
        // direct enumeration
        let ctx = FieldCtx::new(3, 4).unwrap();
        let qn1 = 80u64;
        for d in [1u64, 2, 4] {
            for b in arith::divisors(qn1) {
                let bracket = (qn1) / (3u64.pow(d as u32) - 1);
                let direct = enumerate_irreducibles(&ctx.fq, d as usize)
                    .unwrap()
                    .iter()
                    .filter(|f| (ctx.ell_of(f).unwrap() * bracket) % b == 0)
                    .count();
                assert_eq!(count_irr_div(3, 4, d, &BigInt::from(b)).unwrap(), BigInt::from(direct), "d={d} b={b}");
            }
        }
        assert!(count_irr_div(3, 4, 2, &BigInt::from(7)).is_err());
    }

    #[test]
    fn e_exponent_examples_and_positivity() {
        assert_eq!(e_exponent(5, 1, 0).unwrap(), 0);
        assert_eq!(e_exponent(4, 2, 0).unwrap(), 4);
        assert_eq!(e_exponent(3, 1, 1).unwrap(), 2);
        assert!(e_exponent(4, 3, 0).is_err());
        assert!(e_exponent(4, 2, 2).is_err());
        for n in 1..=12u64 {
            for d in arith::divisors(n) {
                for r in 0..n / d {
                    let e = e_exponent(n, d, r).unwrap();
                    assert_eq!(e > 0, (d, r) != (1, 0));
                    // deg_{n,d,r} is monic of degree e
                    let big = qr(1 << 20);
                    let ratio = deg_ndr_rat(&big, n, d, r).unwrap() / arith::rat_pow(&big, e);
                    assert!(ratio > BigRational::new(1.into(), 2.into()) && ratio < rat(2));
                }
            }
        }
    }

    #[test]
    fn reg_elliptic_sum_matches_direct_and_steinberg() {
        let c = Counter::new(2, 3).unwrap();
        let z1 = PolyQ::from_coeffs(vec![1, 1]);
        for r in 0..3 {
            assert_eq!(
                c.char_sum_reg_elliptic(&z1, r).unwrap(),
                ct_n_size(2, 3) * arith::sign_pow(r as i64)
            );
        }
        for d in [1u64, 3] {
            for f in enumerate_irreducibles(&c.field.fq, d as usize).unwrap().iter() {
                for r in 0..(3 / d) as u32 {
                    let direct = c.char_sum_ct_box(f, r, &pt(&[3])).unwrap();
                    assert_eq!(
                        direct.to_integer().unwrap(),
                        Some(c.char_sum_reg_elliptic(f, r).unwrap()),
                        "f={f:?} r={r}"
                    );
                }
            }
        }
        let f3 = PolyQ::from_coeffs(vec![1, 0, 1, 1]);
        assert!(c.char_sum_ct_box(&f3, 0, &pt(&[2, 1])).unwrap().is_zero_exact().unwrap());
        assert!(c.char_sum_reg_elliptic(&PolyQ::from_coeffs(vec![1, 1, 1]), 0).is_err());
    }

    #[test]
    fn power_identity_matches_direct() {
        for (q, n, d, k) in [(2u64, 2u32, 1u64, 1u64), (2, 3, 3, 2), (3, 2, 2, 2), (2, 3, 1, 3)] {
            let c = Counter::new(q, n).unwrap();
            assert_eq!(
                c.char_sum_power_direct(d, k).unwrap(),
                char_sum_power_identity(q, n as u64, d, k).unwrap(),
                "q={q} n={n} d={d} k={k}"
            );
        }
    }

    #[test]
    fn frobenius_matches_closed() {
        let c = Counter::new(2, 3).unwrap();
        assert_eq!(c.frobenius_count(2, &pt(&[3]), false).unwrap().value, BigInt::from(576));
        assert_eq!(c.frobenius_count(2, &pt(&[2, 1]), true).unwrap().value, BigInt::from(672));
        let c = Counter::new(2, 2).unwrap();
        assert_eq!(c.frobenius_count(2, &pt(&[2]), false).unwrap().value, BigInt::from(2));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut total = BigRational::zero();
        for mu in crate::partitions_sym::partitions(3) {
            total += prob(2, 2, &mu, false).unwrap().0;
        }
        assert_eq!(total, BigRational::one());
        assert_eq!(prob(2, 2, &pt(&[3]), false).unwrap().0, BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn interpolation_roundtrip() {
        let p = RatPoly::from_ints(&[1, -2, 0, 3]);
        let xs: Vec<BigRational> = [2, 3, 5, 7].iter().map(|&x| rat(x)).collect();
        let ys: Vec<BigRational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(RatPoly::interpolate(&xs, &ys), p);
    }

    #[test]
    fn sampling() {
        assert_eq!(sample_prime_powers(3, 1, 5), vec![4, 7, 13, 16, 19]);
        assert_eq!(sample_prime_powers(3, 0, 3), vec![3, 9, 27]);
        assert_eq!(sample_prime_powers(4, 2, 10), vec![2]);
        assert!(matches!(quasipoly_fit(4, 2, 2, None, None), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn q_to_1() {
        assert!(q_to_1_check(3, 2, &pt(&[2, 1])).unwrap());
        assert!(q_to_1_check(4, 2, &pt(&[3, 1])).unwrap());
        assert!(matches!(q_to_1_check(4, 3, &pt(&[2, 1, 1])), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn count_result_json_roundtrip() {
        let r = closed_nu_n(2, 3, 2).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"value\":\"576\""));
        assert!(text.contains("\"method\":\"closed_nu_n\""));
        assert_eq!(CountResult::parse_json(&text).unwrap(), r);
    }
}
