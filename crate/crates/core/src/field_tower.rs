//! The ambient field `F_{q^N}`, `N = lcm(1..=n)`, with a fixed primitive
//! generator `ε`, its subfield generators `ε_d`, the root-of-unity map `θ`
//! and the discrete logarithms behind `ℓ_f`.
//!
//! Elements of the ambient field are stored as powers of `ε`; addition goes
//! through a Zech-logarithm table. The base field `F_q` has its own small
//! representation ([`Fq`]) used for matrices and polynomial coefficients, and
//! is embedded into the ambient field through a precomputed table.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cyclotomic::CyclotomicSum;
use crate::error::{Error, Result};
use crate::poly_irr::{enumerate_irreducibles, PolyQ};

/// Default cap on `q^N - 1`.
pub const DEFAULT_FIELD_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    pub q: u64,
}

impl PrimePower {
    pub fn new(q: u64) -> Result<Self> {
        match arith::prime_power_parts(q) {
            Some((p, e)) => Ok(PrimePower { p, e, q }),
            None => Err(Error::NotPrimePower(q)),
        }
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// Monic polynomials over `F_p` as coefficient vectors, low degree first.
fn fp_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..d {
            prod[k - d + i] = (prod[k - d + i] + (p - c) * modulus[i]) % p;
        }
        prod[k] = 0;
    }
    prod.truncate(d);
    prod.resize(d, 0);
    prod
}

fn fp_powmod_x(exp: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let d = modulus.len() - 1;
    let mut result = vec![0u64; d];
    result[0] = 1;
    let mut base = vec![0u64; d];
    if d == 1 {
        base[0] = (p - modulus[0] % p) % p;
    } else {
        base[1] = 1;
    }
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_mulmod(&result, &base, modulus, p);
        }
        base = fp_mulmod(&base, &base, modulus, p);
        e >>= 1;
    }
    result
}

/// True iff the class of `x` has multiplicative order `p^D - 1` in `F_p[x]/(m)`,
/// which forces `m` to be irreducible and primitive.
pub fn is_primitive_fp(modulus: &[u64], p: u64) -> bool {
    let d = modulus.len().saturating_sub(1);
    if d == 0 || modulus[d] != 1 || modulus[0] == 0 || modulus.iter().any(|&c| c >= p) {
        return false;
    }
    let order = match (p as u128).checked_pow(d as u32) {
        Some(v) if v - 1 <= u64::MAX as u128 => (v - 1) as u64,
        _ => return false,
    };
    let one: Vec<u64> = {
        let mut v = vec![0u64; d];
        v[0] = 1;
        v
    };
    if fp_powmod_x(order, modulus, p) != one {
        return false;
    }
    arith::factorize(order)
        .into_iter()
        .all(|(r, _)| fp_powmod_x(order / r, modulus, p) != one)
}

/// Lexicographically least monic primitive polynomial of degree `d` over `F_p`,
/// comparing the constant coefficient first.
pub fn least_primitive_poly(p: u64, d: u32) -> Vec<u64> {
    let total = p.pow(d);
    for k in 0..total {
        // digit for the constant term is the most significant
        let mut coeffs = vec![0u64; d as usize + 1];
        let mut rem = k;
        for i in (0..d as usize).rev() {
            coeffs[i] = rem % p;
            rem /= p;
        }
        coeffs[d as usize] = 1;
        if is_primitive_fp(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// The base field `F_q`. Elements are codes `0..q`: the base-`p` digits of the
/// coordinates in the basis `1, y, ..., y^{e-1}` of `F_p[y]/(m_e(y))`.
#[derive(Debug, Clone)]
pub struct Fq {
    pub pp: PrimePower,
    /// Defining polynomial over `F_p` (only meaningful when `e > 1`).
    pub modulus: Vec<u64>,
    add_t: Vec<u32>,
    mul_t: Vec<u32>,
    inv_t: Vec<u32>,
    neg_t: Vec<u32>,
}

impl Fq {
    pub fn new(pp: PrimePower) -> Result<Self> {
        let q = pp.q;
        if q > 1 << 12 {
            return Err(Error::TooLarge(format!("base field of order {q}")));
        }
        let p = pp.p;
        let e = pp.e as usize;
        let modulus = if pp.e == 1 {
            vec![0, 1]
        } else {
            least_primitive_poly(p, pp.e)
        };
        let decode = |c: u64| -> Vec<u64> {
            let mut v = vec![0u64; e];
            let mut r = c;
            for d in v.iter_mut() {
                *d = r % p;
                r /= p;
            }
            v
        };
        let encode = |v: &[u64]| -> u64 { v.iter().rev().fold(0u64, |acc, &d| acc * p + d) };
        let qs = q as usize;
        let mut add_t = vec![0u32; qs * qs];
        let mut mul_t = vec![0u32; qs * qs];
        for a in 0..q {
            let da = decode(a);
            for b in 0..q {
                let db = decode(b);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add_t[(a * q + b) as usize] = encode(&s) as u32;
                let m = if pp.e == 1 {
                    vec![a * b % p]
                } else {
                    fp_mulmod(&da, &db, &modulus, p)
                };
                mul_t[(a * q + b) as usize] = encode(&m) as u32;
            }
        }
        let mut inv_t = vec![0u32; qs];
        let mut neg_t = vec![0u32; qs];
        for a in 0..q {
            for b in 0..q {
                if mul_t[(a * q + b) as usize] == 1 {
                    inv_t[a as usize] = b as u32;
                }
                if add_t[(a * q + b) as usize] == 0 {
                    neg_t[a as usize] = b as u32;
                }
            }
        }
        Ok(Fq { pp, modulus, add_t, mul_t, inv_t, neg_t })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.pp.q
    }
    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add_t[a as usize * self.pp.q as usize + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_t[a as usize * self.pp.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg_t[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    /// Multiplicative inverse; `inv(0)` is 0.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv_t[a as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Zero,
    /// `ε^exponent`, exponent reduced mod `M`.
    Unit(u64),
}

/// Cache record for the ambient modulus, keyed by `(p, e, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCacheRecord {
    pub p: u64,
    pub e: u32,
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: u64,
    /// Coefficients over `F_p`, low degree first, monic of degree `e * N`.
    pub modulus: Vec<u64>,
}

impl FieldCacheRecord {
    /// Parses and validates a cache file body. The modulus must be primitive.
    pub fn parse(text: &str) -> Result<Self> {
        let rec: FieldCacheRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !arith::is_prime(self.p) || self.e == 0 || self.n == 0 {
            return Err(Error::Parse("invalid field parameters".into()));
        }
        if self.big_n == 0 || self.big_n > 64 || (self.n as u64) > 64 {
            return Err(Error::Parse("extension degree out of range".into()));
        }
        let deg = self.e as u64 * self.big_n;
        if self.modulus.len() as u64 != deg + 1 {
            return Err(Error::Parse("modulus degree does not match e*N".into()));
        }
        let order_ok = (self.p as u128)
            .checked_pow(deg as u32)
            .map(|v| v <= (1u128 << 40))
            .unwrap_or(false);
        if !order_ok {
            return Err(Error::Parse("field order too large".into()));
        }
        if !is_primitive_fp(&self.modulus, self.p) {
            return Err(Error::Parse("modulus is not primitive".into()));
        }
        Ok(())
    }

    pub fn file_name(p: u64, e: u32, big_n: u64) -> String {
        format!("field_p{p}_e{e}_N{big_n}.json")
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("GLNQ_CACHE").map(PathBuf::from)
}

fn load_cached_modulus(dir: &Path, p: u64, e: u32, big_n: u64) -> Option<Vec<u64>> {
    let path = dir.join(FieldCacheRecord::file_name(p, e, big_n));
    let text = std::fs::read_to_string(path).ok()?;
    let rec = FieldCacheRecord::parse(&text).ok()?;
    (rec.p == p && rec.e == e && rec.big_n == big_n).then_some(rec.modulus)
}

fn store_cached_modulus(dir: &Path, rec: &FieldCacheRecord) {
    let _ = std::fs::create_dir_all(dir);
    let path = dir.join(FieldCacheRecord::file_name(rec.p, rec.e, rec.big_n));
    if let Ok(text) = serde_json::to_string(rec) {
        let _ = std::fs::write(path, text);
    }
}

/// Immutable ambient-field context.
pub struct FieldCtx {
    pub fq: Fq,
    pub n: u32,
    /// Ambient extension degree over `F_q`.
    pub big_n: u64,
    /// `q^N - 1`.
    pub m: u64,
    /// Ambient modulus over `F_p`, low degree first (degree `e * N`).
    pub modulus: Vec<u64>,
    /// Power of the modulus root used as `ε` (1 unless pinned).
    pub generator_power: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    /// Ambient exponent of each `F_q` code (`u64::MAX` for zero).
    embed: Vec<u64>,
    /// `F_q` code of `ε_1^t`.
    unembed: Vec<u32>,
    roots: RwLock<HashMap<u32, Arc<HashMap<PolyQ, u64>>>>,
}

const NO_LOG: u32 = u32::MAX;

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("q", &self.fq.pp.q)
            .field("n", &self.n)
            .field("N", &self.big_n)
            .field("M", &self.m)
            .field("generator_power", &self.generator_power)
            .finish()
    }
}

impl FieldCtx {
    pub fn new(q: u64, n: u32) -> Result<Self> {
        Self::with_budget(q, n, DEFAULT_FIELD_BUDGET)
    }

    pub fn with_budget(q: u64, n: u32, budget: u64) -> Result<Self> {
        let pp = PrimePower::new(q)?;
        if n == 0 {
            return Err(Error::DegreeOutOfRange { degree: 0, max: 0 });
        }
        let big_n = arith::lcm_upto(n);
        let degree = pp.e as u64 * big_n;
        let order = (pp.p as u128).checked_pow(degree as u32);
        let m = match order {
            Some(v) if v - 1 <= budget as u128 => (v - 1) as u64,
            _ => {
                let shown = match order {
                    Some(v) => (v - 1).to_string(),
                    None => format!("{}^{} - 1", pp.p, degree),
                };
                return Err(Error::FieldTooLarge { degree: big_n, order: shown, budget });
            }
        };
        let fq = Fq::new(pp)?;
        let modulus = cache_dir()
            .and_then(|dir| load_cached_modulus(&dir, pp.p, pp.e, big_n))
            .unwrap_or_else(|| {
                let m = least_primitive_poly(pp.p, degree as u32);
                if let Some(dir) = cache_dir() {
                    store_cached_modulus(
                        &dir,
                        &FieldCacheRecord { p: pp.p, e: pp.e, n, big_n, modulus: m.clone() },
                    );
                }
                m
            });
        Self::from_modulus(fq, n, big_n, m, modulus)
    }

    /// Builds a context whose generator `ε` is chosen so that `ε_d` is a root
    /// of the given irreducible `pin` of degree `d`.
    pub fn pinned(q: u64, n: u32, pin: &PolyQ) -> Result<Self> {
        let base = Self::new(q, n)?;
        base.repin(pin)
    }

    /// Re-targets the generator: the smallest `j` coprime to `M` such that
    /// `pin(ε^{j M/(q^d-1)}) = 0` replaces `ε` by `ε^j`.
    pub fn repin(self, pin: &PolyQ) -> Result<Self> {
        let d = pin.degree() as u64;
        if d == 0 || d > self.n as u64 {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.n as u64 });
        }
        let step = self.m / (self.q_pow(d) - 1);
        let mut chosen = None;
        for j in 1..self.m.max(2) {
            if arith::gcd(j, self.m) != 1 {
                continue;
            }
            let x = FieldElem::Unit(j % self.m * step % self.m);
            if self.eval_poly(pin, x) == FieldElem::Zero {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.ok_or(Error::NotIrreducible)?;
        let mut ctx = self;
        if j != 1 {
            let m = ctx.m;
            let old_exp = std::mem::take(&mut ctx.exp);
            let mut exp = vec![0u32; m as usize];
            for (a, slot) in exp.iter_mut().enumerate() {
                *slot = old_exp[((a as u128 * j as u128) % m as u128) as usize];
            }
            let mut log = vec![NO_LOG; ctx.log.len()];
            for (a, &idx) in exp.iter().enumerate() {
                log[idx as usize] = a as u32;
            }
            ctx.exp = exp;
            ctx.log = log;
            ctx.generator_power = ctx.generator_power * j % m;
            ctx.rebuild_derived();
        }
        Ok(ctx)
    }

    fn from_modulus(fq: Fq, n: u32, big_n: u64, m: u64, modulus: Vec<u64>) -> Result<Self> {
        let p = fq.pp.p;
        let dim = modulus.len() - 1;
        let size = (m + 1) as usize;
        let mut exp = vec![0u32; m as usize];
        let mut log = vec![NO_LOG; size];
        let mut digits = vec![0u64; dim];
        digits[0] = 1;
        let encode = |v: &[u64]| -> u32 { v.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u32 };
        for a in 0..m {
            let idx = encode(&digits);
            exp[a as usize] = idx;
            log[idx as usize] = a as u32;
            // multiply by x
            let top = digits[dim - 1];
            for i in (1..dim).rev() {
                digits[i] = digits[i - 1];
            }
            digits[0] = 0;
            if top != 0 {
                for i in 0..dim {
                    digits[i] = (digits[i] + (p - top) * modulus[i] % p) % p;
                }
            }
        }
        let mut ctx = FieldCtx {
            fq,
            n,
            big_n,
            m,
            modulus,
            generator_power: 1,
            exp,
            log,
            zech: Vec::new(),
            embed: Vec::new(),
            unembed: Vec::new(),
            roots: RwLock::new(HashMap::new()),
        };
        ctx.rebuild_derived();
        Ok(ctx)
    }

    fn rebuild_derived(&mut self) {
        let p = self.fq.pp.p;
        let m = self.m;
        let mut zech = vec![NO_LOG; m as usize];
        for a in 0..m {
            let idx = self.exp[a as usize] as u64;
            let c0 = idx % p;
            let plus_one = idx - c0 + (c0 + 1) % p;
            zech[a as usize] = if plus_one == 0 { NO_LOG } else { self.log[plus_one as usize] };
        }
        self.zech = zech;
        self.roots = RwLock::new(HashMap::new());

        // Embedding of F_q: y maps to the root of m_e with the smallest exponent.
        let q = self.fq.pp.q;
        let e = self.fq.pp.e as usize;
        let step = m / (q - 1);
        let beta = if e == 1 {
            FieldElem::Zero
        } else {
            let me: Vec<u32> = self.fq.modulus.iter().map(|&c| c as u32).collect();
            (0..q - 1)
                .map(|t| FieldElem::Unit(t * step % m))
                .find(|&x| self.eval_fp_poly(&me, x) == FieldElem::Zero)
                .expect("F_q embeds in the ambient field")
        };
        let mut embed = vec![u64::MAX; q as usize];
        let mut unembed = vec![0u32; (q - 1) as usize];
        for code in 1..q {
            let x = if e == 1 {
                self.const_fp(code)
            } else {
                let mut acc = FieldElem::Zero;
                let mut r = code;
                let mut pw = FieldElem::Unit(0);
                for _ in 0..e {
                    let digit = r % p;
                    r /= p;
                    if digit != 0 {
                        acc = self.add(acc, self.mul(self.const_fp(digit), pw));
                    }
                    pw = self.mul(pw, beta);
                }
                acc
            };
            let a = match x {
                FieldElem::Unit(a) => a,
                FieldElem::Zero => unreachable!("nonzero code maps to a unit"),
            };
            embed[code as usize] = a;
            unembed[(a / step) as usize] = code as u32;
        }
        self.embed = embed;
        self.unembed = unembed;
    }

    /// Constant `c ∈ F_p` as an ambient element.
    fn const_fp(&self, c: u64) -> FieldElem {
        let c = c % self.fq.pp.p;
        if c == 0 {
            FieldElem::Zero
        } else {
            FieldElem::Unit(self.log[c as usize] as u64)
        }
    }

    fn eval_fp_poly(&self, coeffs: &[u32], x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::Zero;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), self.const_fp(c as u64));
        }
        acc
    }

    pub fn q(&self) -> u64 {
        self.fq.pp.q
    }

    /// `q^d` as u64 (callers keep `d <= N`).
    pub fn q_pow(&self, d: u64) -> u64 {
        self.fq.pp.q.pow(d as u32)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Unit(x), FieldElem::Unit(y)) => FieldElem::Unit((x + y) % self.m),
            _ => FieldElem::Zero,
        }
    }

    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        match a {
            FieldElem::Zero if k == 0 => FieldElem::Unit(0),
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Unit(x) => {
                FieldElem::Unit(((x as u128 * k as u128) % self.m as u128) as u64)
            }
        }
    }

    /// Addition through the Zech table: `ε^a + ε^b = ε^{a + Z(b - a)}`.
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Zero, x) | (x, FieldElem::Zero) => x,
            (FieldElem::Unit(x), FieldElem::Unit(y)) => {
                let diff = (y + self.m - x) % self.m;
                let z = self.zech[diff as usize];
                if z == NO_LOG {
                    FieldElem::Zero
                } else {
                    FieldElem::Unit((x + z as u64) % self.m)
                }
            }
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        match a {
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Unit(x) => {
                if self.fq.pp.p == 2 {
                    a
                } else {
                    FieldElem::Unit((x + self.m / 2) % self.m)
                }
            }
        }
    }

    pub fn embed(&self, code: u32) -> FieldElem {
        let a = self.embed[code as usize];
        if a == u64::MAX {
            FieldElem::Zero
        } else {
            FieldElem::Unit(a)
        }
    }

    /// Inverse of [`FieldCtx::embed`]; `None` when `x ∉ F_q`.
    pub fn unembed(&self, x: FieldElem) -> Option<u32> {
        match x {
            FieldElem::Zero => Some(0),
            FieldElem::Unit(a) => {
                let step = self.m / (self.q() - 1);
                (a % step == 0).then(|| self.unembed[(a / step) as usize])
            }
        }
    }

    /// Evaluates a polynomial with `F_q` coefficients at an ambient element.
    pub fn eval_poly(&self, f: &PolyQ, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::Zero;
        for &c in f.coeffs().iter().rev() {
            acc = self.add(self.mul(acc, x), self.embed(c));
        }
        acc
    }

    /// `ε_d = ε^{M/(q^d-1)}`.
    pub fn subfield_generator(&self, d: u64) -> Result<FieldElem> {
        if d == 0 || d > self.n as u64 {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.n as u64 });
        }
        Ok(FieldElem::Unit(self.m / (self.q_pow(d) - 1) % self.m))
    }

    pub fn dlog(&self, x: FieldElem) -> Result<u64> {
        match x {
            FieldElem::Zero => Err(Error::ZeroInput),
            FieldElem::Unit(a) => Ok(a),
        }
    }

    /// `θ(x)` as a one-term sum of `M`-th roots of unity.
    pub fn theta(&self, x: FieldElem) -> Result<CyclotomicSum> {
        Ok(CyclotomicSum::root(self.m, self.dlog(x)?))
    }

    /// `θ_n`, the isomorphism `F_{q^n}^× → Z/(q^n - 1)` sending `ε_n` to 1.
    pub fn theta_n(&self, x: FieldElem) -> Result<u64> {
        let a = self.dlog(x)?;
        let step = self.m / (self.q_pow(self.n as u64) - 1);
        if a % step != 0 {
            return Err(Error::NotInSubfield);
        }
        Ok(a / step)
    }

    /// Index (base-`p` digit encoding) of an ambient element; exposed for tests.
    pub fn element_index(&self, x: FieldElem) -> u64 {
        match x {
            FieldElem::Zero => 0,
            FieldElem::Unit(a) => self.exp[a as usize] as u64,
        }
    }

    /// Canonical orbit representative: the least element of `{ℓ q^i mod (q^d - 1)}`.
    pub fn canonical_ell(&self, ell: u64, d: u64) -> u64 {
        let md = self.q_pow(d) - 1;
        let mut best = ell % md;
        let mut cur = best;
        for _ in 0..d {
            cur = ((cur as u128 * self.q() as u128) % md as u128) as u64;
            best = best.min(cur);
        }
        best
    }

    /// Map from every `f ∈ 𝓕_d(q)` to its canonical `ℓ_f`.
    pub fn ell_table(&self, d: u32) -> Result<Arc<HashMap<PolyQ, u64>>> {
        if d == 0 || d > self.n {
            return Err(Error::DegreeOutOfRange { degree: d as u64, max: self.n as u64 });
        }
        if let Some(t) = self.roots.read().unwrap().get(&d) {
            return Ok(t.clone());
        }
        let md = self.q_pow(d as u64) - 1;
        let step = self.m / md;
        let mut table = HashMap::new();
        for ell in 0..md {
            if self.canonical_ell(ell, d as u64) != ell {
                continue;
            }
            // orbit size must be exactly d
            let mut orbit = vec![ell];
            let mut cur = ell;
            loop {
                cur = ((cur as u128 * self.q() as u128) % md as u128) as u64;
                if cur == ell {
                    break;
                }
                orbit.push(cur);
            }
            if orbit.len() != d as usize {
                continue;
            }
            // minimal polynomial ∏ (z - ε_d^{ℓ q^i}) with ambient coefficients
            let mut poly: Vec<FieldElem> = vec![FieldElem::Unit(0)];
            for &o in &orbit {
                let root = FieldElem::Unit(o * step % self.m);
                let neg_root = self.neg(root);
                let mut next = vec![FieldElem::Zero; poly.len() + 1];
                for (i, &c) in poly.iter().enumerate() {
                    next[i + 1] = self.add(next[i + 1], c);
                    next[i] = self.add(next[i], self.mul(c, neg_root));
                }
                poly = next;
            }
            let coeffs: Vec<u32> = poly
                .iter()
                .map(|&c| self.unembed(c).expect("minimal polynomial has F_q coefficients"))
                .collect();
            table.insert(PolyQ::from_coeffs(coeffs), ell);
        }
        let table = Arc::new(table);
        self.roots.write().unwrap().insert(d, table.clone());
        Ok(table)
    }

    /// Canonical `ℓ_f`: the least `ℓ` with `ε_d^ℓ` a root of `f`.
    pub fn ell_of(&self, f: &PolyQ) -> Result<u64> {
        let d = f.degree() as u32;
        if d == 0 || d > self.n {
            return Err(Error::DegreeOutOfRange { degree: d as u64, max: self.n as u64 });
        }
        self.ell_table(d)?.get(f).copied().ok_or(Error::NotIrreducible)
    }

    /// Exponent of `ε_d^ℓ` in terms of `ε`.
    pub fn subfield_power(&self, d: u64, ell: u64) -> u64 {
        let md = self.q_pow(d) - 1;
        ((ell % md) as u128 * (self.m / md) as u128 % self.m as u128) as u64
    }

    pub fn cache_record(&self) -> FieldCacheRecord {
        FieldCacheRecord {
            p: self.fq.pp.p,
            e: self.fq.pp.e,
            n: self.n,
            big_n: self.big_n,
            modulus: self.modulus.clone(),
        }
    }
}

/// Outcome of a disjoint-union check over roots of irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCheck {
    pub d: u64,
    /// Sorted values hit by the roots, with repetition.
    pub values: Vec<u64>,
    /// The set the union should equal, sorted.
    pub expected: Vec<u64>,
    pub disjoint: bool,
    pub complete: bool,
}

impl PartitionCheck {
    pub fn passed(&self) -> bool {
        self.disjoint && self.complete
    }

    fn build(d: u64, mut values: Vec<u64>, expected: Vec<u64>) -> Self {
        values.sort_unstable();
        let disjoint = values.windows(2).all(|w| w[0] != w[1]);
        let mut distinct = values.clone();
        distinct.dedup();
        let complete = distinct == expected;
        PartitionCheck { d, values, expected, disjoint, complete }
    }
}

impl FieldCtx {
    /// Roots of `f` inside `F_{q^d}^×`, found by evaluation, as exponents of `ε_d`.
    fn roots_in_subfield(&self, f: &PolyQ, d: u64) -> Vec<u64> {
        let md = self.q_pow(d) - 1;
        let step = self.m / md;
        (0..md)
            .filter(|&k| self.eval_poly(f, FieldElem::Unit(k * step % self.m)) == FieldElem::Zero)
            .collect()
    }

    /// θ of the roots of every `f ∈ 𝓕_c`, `c | d`, must tile the `(q^d-1)`-th roots of unity.
    pub fn check_theta_root_union(&self, d: u64) -> Result<PartitionCheck> {
        if d == 0 || d > self.n as u64 {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.n as u64 });
        }
        let md = self.q_pow(d) - 1;
        let mut values = Vec::new();
        for c in arith::divisors(d) {
            for f in enumerate_irreducibles(&self.fq, c as usize)?.iter() {
                values.extend(self.roots_in_subfield(f, d));
            }
        }
        Ok(PartitionCheck::build(d, values, (0..md).collect()))
    }

    /// θ_n of the roots of every `f ∈ 𝓕_c`, `c | d`, must tile the multiples of `[n/d]_{q^d}` mod `q^n - 1`.
    pub fn check_theta_n_map(&self, d: u64) -> Result<PartitionCheck> {
        let n = self.n as u64;
        if d == 0 || n % d != 0 {
            return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
        }
        let mn = self.q_pow(n) - 1;
        let bracket = (self.q_pow(n) - 1) / (self.q_pow(d) - 1);
        let mut values = Vec::new();
        for c in arith::divisors(d) {
            for f in enumerate_irreducibles(&self.fq, c as usize)?.iter() {
                for k in self.roots_in_subfield(f, d) {
                    let alpha = FieldElem::Unit(k * (self.m / (self.q_pow(d) - 1)) % self.m);
                    values.push(self.theta_n(alpha)?);
                }
            }
        }
        let mut expected: Vec<u64> = (0..mn).map(|m| m * bracket % mn).collect();
        expected.sort_unstable();
        expected.dedup();
        Ok(PartitionCheck::build(d, values, expected))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[u32]) -> PolyQ {
        PolyQ::from_coeffs(c.to_vec())
    }

    #[test]
    fn root_partitions_tile() {
        for (q, n) in [(2u64, 3u32), (2, 4), (3, 4)] {
            let ctx = FieldCtx::new(q, n).unwrap();
            for d in 1..=n as u64 {
                assert!(ctx.check_theta_root_union(d).unwrap().passed(), "q={q} n={n} d={d}");
                if n as u64 % d == 0 {
                    assert!(ctx.check_theta_n_map(d).unwrap().passed(), "q={q} n={n} d={d}");
                }
            }
        }
        let ctx = FieldCtx::new(3, 4).unwrap();
        let mut vals = ctx.check_theta_n_map(2).unwrap().values;
        vals.dedup();
        assert_eq!(vals, vec![0, 10, 20, 30, 40, 50, 60, 70]);
        assert!(ctx.check_theta_n_map(3).is_err());
    }

    #[test]
    fn ambient_sizes() {
        let c = FieldCtx::new(2, 2).unwrap();
        assert_eq!((c.big_n, c.m), (2, 3));
        let c = FieldCtx::new(2, 3).unwrap();
        assert_eq!((c.big_n, c.m), (6, 63));
        let c = FieldCtx::new(3, 4).unwrap();
        assert_eq!((c.big_n, c.m), (12, 531440));
    }

    #[test]
    fn refuses_composite_and_oversized() {
        assert_eq!(FieldCtx::new(6, 2).unwrap_err(), Error::NotPrimePower(6));
        assert!(matches!(FieldCtx::new(7, 4), Err(Error::FieldTooLarge { .. })));
        assert!(matches!(FieldCtx::with_budget(2, 3, 10), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn subfield_generators_q2_n3() {
        let c = FieldCtx::new(2, 3).unwrap();
        assert_eq!(c.subfield_generator(1).unwrap(), FieldElem::Unit(0));
        assert_eq!(c.subfield_generator(3).unwrap(), FieldElem::Unit(9));
        assert_eq!(c.subfield_generator(2).unwrap(), FieldElem::Unit(21));
        assert!(matches!(c.subfield_generator(4), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn subfield_generator_orders() {
        for (q, n) in [(2u64, 3u32), (3, 4), (4, 2), (2, 4), (5, 2)] {
            let c = FieldCtx::new(q, n).unwrap();
            for d in 1..=n as u64 {
                let FieldElem::Unit(a) = c.subfield_generator(d).unwrap() else { panic!() };
                let order = c.q_pow(d) - 1;
                assert_eq!((a as u128 * order as u128) % c.m as u128, 0);
                for (r, _) in arith::factorize(order) {
                    assert_ne!((a as u128 * (order / r) as u128) % c.m as u128, 0);
                }
            }
        }
    }

    #[test]
    fn dlog_basics() {
        let c = FieldCtx::new(2, 3).unwrap();
        assert_eq!(c.dlog(FieldElem::Unit(0)).unwrap(), 0);
        assert_eq!(c.dlog(FieldElem::Unit(1)).unwrap(), 1);
        assert_eq!(c.dlog(c.subfield_generator(2).unwrap()).unwrap(), 21);
        assert_eq!(c.dlog(FieldElem::Zero), Err(Error::ZeroInput));
    }

    #[test]
    fn zech_addition_is_consistent_with_digits() {
        let c = FieldCtx::new(3, 2).unwrap();
        let p = 3u64;
        for a in 0..c.m {
            for b in 0..c.m {
                let s = c.add(FieldElem::Unit(a), FieldElem::Unit(b));
                let ia = c.element_index(FieldElem::Unit(a));
                let ib = c.element_index(FieldElem::Unit(b));
                let mut sum = 0;
                let mut pw = 1;
                let (mut x, mut y) = (ia, ib);
                for _ in 0..2 {
                    sum += ((x % p + y % p) % p) * pw;
                    pw *= p;
                    x /= p;
                    y /= p;
                }
                assert_eq!(c.element_index(s), sum);
            }
        }
    }

    #[test]
    fn ell_table_small_cases() {
        let c = FieldCtx::new(2, 3).unwrap();
        // z^2+z+1: roots are the order-3 elements ε_2, ε_2^2
        let l = c.ell_of(&poly(&[1, 1, 1])).unwrap();
        assert!(l == 1 || l == 2);
        assert_eq!(l, 1);
        let c = FieldCtx::new(3, 4).unwrap();
        assert_eq!(c.ell_of(&poly(&[2, 1])).unwrap(), 0);
        assert_eq!(c.ell_of(&poly(&[1, 1])).unwrap(), 1);
        assert_eq!(c.ell_of(&poly(&[1, 0, 1])).unwrap(), 2);
        assert_eq!(c.ell_of(&poly(&[0, 1])), Err(Error::NotIrreducible));
    }

    #[test]
    fn theta_n_and_subfield_check() {
        let c = FieldCtx::new(3, 4).unwrap();
        let en = c.subfield_generator(4).unwrap();
        assert_eq!(c.theta_n(en).unwrap(), 1);
        // ε itself is not in F_{81}
        assert_eq!(c.theta_n(FieldElem::Unit(1)), Err(Error::NotInSubfield));
    }

    #[test]
    fn cache_record_roundtrip_and_validation() {
        let c = FieldCtx::new(2, 3).unwrap();
        let rec = c.cache_record();
        let text = serde_json::to_string(&rec).unwrap();
        assert_eq!(FieldCacheRecord::parse(&text).unwrap(), rec);
        let mut bad = rec.clone();
        bad.modulus = vec![1, 0, 0, 0, 0, 0, 1];
        let text = serde_json::to_string(&bad).unwrap();
        assert!(FieldCacheRecord::parse(&text).is_err());
        assert!(FieldCacheRecord::parse("{").is_err());
    }

    #[test]
    fn least_primitive_polys() {
        // constant term compares first, so x^3+x^2+1 precedes x^3+x+1
        assert_eq!(least_primitive_poly(2, 2), vec![1, 1, 1]);
        assert_eq!(least_primitive_poly(2, 3), vec![1, 0, 1, 1]);
        assert_eq!(least_primitive_poly(3, 2), vec![2, 1, 1]);
    }
}
