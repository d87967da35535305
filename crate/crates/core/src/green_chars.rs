//! Irreducible characters of `GL_n(F_q)` by Green's construction: primary-support
//! characters `P`, their parabolic products `B`, the combinations `J`, and the
//! final parabolic product over the support of an index. Everything is brute
//! force over the group and therefore limited to tiny `(n, q)`.
//!
//! The fast path [`primary_on_rss`] evaluates primary characters on regular
//! semisimple classes directly from root data, without touching the group.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::cyclotomic::CyclotomicSum;
use crate::error::{Error, Result};
use crate::field_tower::FieldCtx;
use crate::matrix_group::{
    class_index, class_size, enumerate_class_indices, enumerate_group, gamma_n, ClassIndex, MatrixQ,
    GROUP_BUDGET,
};
use crate::partitions_sym::{mn_character, partitions, Partition};
use crate::poly_irr::PolyQ;

/// One general linear group with its classes.
pub struct GroupData {
    pub m: usize,
    pub elements: Vec<MatrixQ>,
    /// Class id of each element, parallel to `elements`.
    pub element_class: Vec<usize>,
    pub class_of: HashMap<MatrixQ, usize>,
    pub classes: Vec<ClassIndex>,
    pub sizes: Vec<BigInt>,
    /// First element of each class in enumeration order.
    pub reps: Vec<MatrixQ>,
}

impl GroupData {
    fn build(field: &FieldCtx, m: usize, budget: u64) -> Result<Self> {
        let fq = &field.fq;
        let elements = enumerate_group(fq, m, budget)?;
        let classes = enumerate_class_indices(fq, m)?;
        let pos: HashMap<&ClassIndex, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut element_class = Vec::with_capacity(elements.len());
        let mut reps: Vec<Option<MatrixQ>> = vec![None; classes.len()];
        for g in &elements {
            let id = pos[&class_index(g, fq)?];
            element_class.push(id);
            if reps[id].is_none() {
                reps[id] = Some(g.clone());
            }
        }
        let sizes = classes.iter().map(|c| class_size(fq.q(), c, m)).collect::<Result<Vec<_>>>()?;
        let class_of = elements.iter().cloned().zip(element_class.iter().copied()).collect();
        Ok(GroupData {
            m,
            elements,
            element_class,
            class_of,
            classes,
            sizes,
            reps: reps.into_iter().map(|r| r.expect("every class is populated")).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn class_id(&self, idx: &ClassIndex) -> Option<usize> {
        self.classes.iter().position(|c| c == idx)
    }
}

/// Class function on `GL_m`, one value per class.
pub type ClassFn = Arc<Vec<CyclotomicSum>>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum CharKey {
    P { d: usize, b: u64 },
    B { d: usize, nu: Vec<u32>, ell: u64 },
    J { f: PolyQ, lam: Partition, ell: u64 },
    Chi(ClassIndex),
}

/// Multiset of `(class of h, classes of the diagonal blocks of h)` over `h` in a parabolic.
struct InductionTable {
    parabolic_order: usize,
    rows: Vec<(usize, Vec<usize>, u64)>,
}

pub struct GreenCtx {
    pub field: Arc<FieldCtx>,
    pub n: usize,
    budget: u64,
    groups: Vec<OnceLock<Arc<GroupData>>>,
    inductions: Mutex<HashMap<Vec<u32>, Arc<InductionTable>>>,
    chars: Mutex<HashMap<CharKey, ClassFn>>,
}

impl GreenCtx {
    pub fn new(field: Arc<FieldCtx>) -> Self {
        Self::with_budget(field, GROUP_BUDGET)
    }

    pub fn with_budget(field: Arc<FieldCtx>, budget: u64) -> Self {
        let n = field.n as usize;
        GreenCtx {
            field,
            n,
            budget,
            groups: (0..=n).map(|_| OnceLock::new()).collect(),
            inductions: Mutex::new(HashMap::new()),
            chars: Mutex::new(HashMap::new()),
        }
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    fn m(&self) -> u64 {
        self.field.m
    }

    pub fn group(&self, m: usize) -> Result<Arc<GroupData>> {
        if m == 0 || m > self.n {
            return Err(Error::DegreeOutOfRange { degree: m as u64, max: self.n as u64 });
        }
        if let Some(g) = self.groups[m].get() {
            return Ok(g.clone());
        }
        let size = gamma_n(self.q(), m as u64);
        if size > BigInt::from(self.budget) {
            return Err(Error::GroupTooLarge(size.to_string()));
        }
        let data = Arc::new(GroupData::build(&self.field, m, self.budget)?);
        let _ = self.groups[m].set(data.clone());
        Ok(self.groups[m].get().cloned().unwrap_or(data))
    }

    fn induction_table(&self, composition: &[u32]) -> Result<Arc<InductionTable>> {
        if let Some(t) = self.inductions.lock().unwrap().get(composition) {
            return Ok(t.clone());
        }
        let m: u32 = composition.iter().sum();
        let big = self.group(m as usize)?;
        let smalls = composition
            .iter()
            .map(|&b| self.group(b as usize))
            .collect::<Result<Vec<_>>>()?;
        let mut counts: BTreeMap<(usize, Vec<usize>), u64> = BTreeMap::new();
        let mut parabolic_order = 0usize;
        for (h, &cls) in big.elements.iter().zip(&big.element_class) {
            if !h.is_block_upper(composition) {
                continue;
            }
            parabolic_order += 1;
            let mut start = 0usize;
            let mut blocks = Vec::with_capacity(composition.len());
            for (i, &b) in composition.iter().enumerate() {
                let blk = h.block(start, b as usize);
                blocks.push(smalls[i].class_of[&blk]);
                start += b as usize;
            }
            *counts.entry((cls, blocks)).or_insert(0) += 1;
        }
        let table = Arc::new(InductionTable {
            parabolic_order,
            rows: counts.into_iter().map(|((c, b), k)| (c, b, k)).collect(),
        });
        self.inductions.lock().unwrap().insert(composition.to_vec(), table.clone());
        Ok(table)
    }

    /// Parabolic induction `⊙ χ_i` as a class function on `GL_{|ν|}`.
    pub fn induce(&self, composition: &[u32], factors: &[ClassFn]) -> Result<ClassFn> {
        if composition.len() != factors.len() {
            return Err(Error::SizeMismatch("one factor per block".into()));
        }
        let m: u32 = composition.iter().sum();
        if composition.len() == 1 {
            return Ok(factors[0].clone());
        }
        let big = self.group(m as usize)?;
        let table = self.induction_table(composition)?;
        let modulus = self.m();
        let mut sums = vec![CyclotomicSum::zero(modulus); big.classes.len()];
        for (cls, blocks, count) in &table.rows {
            let mut prod = CyclotomicSum::from_int(modulus, *count as i64);
            for (i, &b) in blocks.iter().enumerate() {
                prod = prod.mul(&factors[i][b]);
                if prod.is_structurally_zero() {
                    break;
                }
            }
            sums[*cls].add_assign(&prod);
        }
        let group_order = BigInt::from(big.order());
        let out = sums
            .into_iter()
            .zip(&big.sizes)
            .map(|(s, size)| {
                // (|G| / |C|) / |P|
                let scale = BigRational::new(
                    group_order.clone(),
                    size * BigInt::from(table.parabolic_order),
                );
                tidy(s.scale(&scale))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(out))
    }

    fn cached(&self, key: CharKey, build: impl FnOnce() -> Result<ClassFn>) -> Result<ClassFn> {
        if let Some(v) = self.chars.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = build()?;
        self.chars.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `P_d^b` on the classes of `GL_d`.
    pub fn p_char(&self, d: usize, b: u64) -> Result<ClassFn> {
        let b = b % self.m();
        self.cached(CharKey::P { d, b }, || {
            let g = self.group(d)?;
            let modulus = self.m();
            let q = self.q();
            let vals = g
                .classes
                .iter()
                .map(|idx| -> Result<CyclotomicSum> {
                    let Some((h, mu)) = idx.as_primary() else {
                        return Ok(CyclotomicSum::zero(modulus));
                    };
                    let e = h.degree() as u64;
                    let t = arith::big_pow(q, e);
                    let kappa = (1..mu.len() as u64)
                        .fold(BigInt::one(), |acc, i| acc * (BigInt::one() - num_traits::pow(t.clone(), i as usize)));
                    let base = self.field.subfield_power(e, self.field.ell_of(h)?);
                    let mut s = CyclotomicSum::zero(modulus);
                    for i in 1..=e {
                        let qi = arith::mod_pow(q, i, modulus);
                        s.add_term(mulmod3(base, qi, b, modulus), BigRational::one());
                    }
                    Ok(s.scale(&BigRational::from_integer(kappa)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(vals))
        })
    }

    /// `B_{dν}^{ℓ α_d}` on `GL_{d|ν|}`.
    pub fn b_char(&self, d: usize, nu: &Partition, ell: u64) -> Result<ClassFn> {
        self.cached(CharKey::B { d, nu: nu.parts().to_vec(), ell }, || {
            let qd = arith::big_pow(self.q(), d as u64);
            let composition: Vec<u32> = nu.parts().iter().map(|&p| p * d as u32).collect();
            let factors = nu
                .parts()
                .iter()
                .map(|&p| {
                    let alpha = arith::q_int(p as u64, &qd) % BigInt::from(self.m());
                    let alpha: u64 = alpha.try_into().expect("reduced below M");
                    self.p_char(p as usize * d, mulmod(ell, alpha, self.m()))
                })
                .collect::<Result<Vec<_>>>()?;
            self.induce(&composition, &factors)
        })
    }

    /// `J_f^λ` with a caller-supplied `ℓ_f`.
    pub fn j_char_with_ell(&self, f: &PolyQ, lam: &Partition, ell: u64) -> Result<ClassFn> {
        self.cached(CharKey::J { f: f.clone(), lam: lam.clone(), ell }, || {
            let d = f.degree();
            let m = lam.size() as usize * d;
            let g = self.group(m)?;
            let modulus = self.m();
            let mut acc = vec![CyclotomicSum::zero(modulus); g.classes.len()];
            for nu in partitions(lam.size()) {
                let chi = mn_character(lam, &nu)?;
                if chi == 0 {
                    continue;
                }
                let coef = BigRational::new(BigInt::from(chi), BigInt::from(nu.z()));
                let b = self.b_char(d, &nu, ell)?;
                for (a, v) in acc.iter_mut().zip(b.iter()) {
                    a.add_assign(&v.scale(&coef));
                }
            }
            let sign = arith::sign_pow(lam.size() as i64 * (d as i64 - 1));
            let out = acc.into_iter().map(|v| tidy(v.scale_int(sign))).collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(out))
        })
    }

    pub fn j_char(&self, f: &PolyQ, lam: &Partition) -> Result<ClassFn> {
        self.j_char_with_ell(f, lam, self.field.ell_of(f)?)
    }

    /// `χ^Λ` on the classes of `GL_{‖Λ‖}`.
    pub fn chi(&self, idx: &ClassIndex) -> Result<ClassFn> {
        self.cached(CharKey::Chi(idx.clone()), || {
            let mut composition = Vec::new();
            let mut factors = Vec::new();
            for (f, lam) in idx.entries() {
                composition.push((f.degree() * lam.size() as usize) as u32);
                factors.push(self.j_char(f, lam)?);
            }
            let vals = self.induce(&composition, &factors)?;
            // character values are algebraic integers
            for v in vals.iter() {
                if v.terms().any(|(_, c)| !c.denom().is_one()) {
                    return Err(Error::InexactDivision(format!("χ^{{{idx}}} has value {v}")));
                }
            }
            Ok(vals)
        })
    }

    /// `χ^Λ(g)` for a concrete matrix.
    pub fn chi_at(&self, idx: &ClassIndex, g: &MatrixQ) -> Result<CyclotomicSum> {
        let data = self.group(g.n())?;
        if idx.norm() != g.n() {
            return Err(Error::SizeMismatch(format!("‖{idx}‖ != {}", g.n())));
        }
        let cls = *data.class_of.get(g).ok_or(Error::Singular)?;
        Ok(self.chi(idx)?[cls].clone())
    }

    /// Full character table of `GL_n`, rows and columns in class-index order.
    pub fn character_table(&self) -> Result<CharacterTable> {
        let g = self.group(self.n)?;
        let rows: Vec<ClassIndex> = g.classes.clone();
        let values = rows
            .par_iter()
            .map(|idx| self.chi(idx).map(|v| v.as_ref().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(CharacterTable {
            q: self.q(),
            n: self.n,
            classes: g.classes.clone(),
            class_sizes: g.sizes.clone(),
            characters: rows,
            values,
            identity_class: g.class_of[&MatrixQ::identity(self.n)],
        })
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mulmod3(a: u64, b: u64, c: u64, m: u64) -> u64 {
    mulmod(mulmod(a, b, m), c, m)
}

/// Canonical form when exact reduction is available, otherwise unchanged.
fn tidy(v: CyclotomicSum) -> Result<CyclotomicSum> {
    match v.canonical() {
        Ok(c) => Ok(c.lift(v.modulus())),
        Err(Error::ModulusTooLarge(_)) => Ok(v),
        Err(e) => Err(e),
    }
}

/// `ψ_m(t) = (t^m - 1) ⋯ (t - 1)`.
pub fn psi(m: u64, t: &BigRational) -> BigRational {
    (1..=m).fold(BigRational::one(), |acc, i| acc * (arith::rat_pow(t, i as i64) - BigRational::one()))
}

/// `[λ : t]`.
pub fn lambda_bracket(lam: &Partition, t: &BigRational) -> BigRational {
    let p = lam.parts();
    let l = p.len() as i64;
    let mut num = arith::rat_pow(t, lam.b_stat() as i64);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let e = (p[i] as i64 - p[j] as i64) - (i as i64 - j as i64);
            num *= arith::rat_pow(t, e) - BigRational::one();
        }
    }
    let den = p
        .iter()
        .enumerate()
        .fold(BigRational::one(), |acc, (i, &x)| acc * psi((x as i64 + l - 1 - i as i64) as u64, t));
    num / den
}

/// `deg χ^Λ = ψ_n(q) ∏ [Λ(f) : q^{deg f}]`.
pub fn char_degree(q: u64, idx: &ClassIndex, n: usize) -> Result<BigInt> {
    if idx.norm() != n {
        return Err(Error::NormMismatch { expected: n as u64, found: idx.norm() as u64 });
    }
    let qr = BigRational::from_integer(BigInt::from(q));
    let mut acc = psi(n as u64, &qr);
    for (f, lam) in idx.entries() {
        acc *= lambda_bracket(lam, &arith::rat_pow(&qr, f.degree() as i64));
    }
    arith::rat_to_int(&acc).ok_or_else(|| Error::InexactResult(format!("deg χ^{{{idx}}}")))
}

/// `deg_{n,d,r}(q)` evaluated at a rational `q`.
pub fn deg_ndr_rat(q: &BigRational, n: u64, d: u64, r: u64) -> Result<BigRational> {
    if d == 0 || n % d != 0 || r >= n / d {
        return Err(Error::RangeError(format!("deg_{{{n},{d},{r}}}")));
    }
    let qd = arith::rat_pow(q, d as i64);
    let tri = (r * (r + 1) / 2) as i64;
    let num = (1..=n).fold(BigRational::one(), |acc, i| acc * (arith::rat_pow(q, i as i64) - BigRational::one()));
    let den = (1..=n / d).fold(BigRational::one(), |acc, j| acc * (arith::rat_pow(&qd, j as i64) - BigRational::one()));
    Ok(arith::rat_pow(&qd, tri) * num / den * arith::q_binomial_rat(n / d - 1, r, &qd))
}

pub fn deg_ndr(q: u64, n: u64, d: u64, r: u64) -> Result<BigRational> {
    deg_ndr_rat(&BigRational::from_integer(BigInt::from(q)), n, d, r)
}

/// `χ^{f↦λ}` on a regular semisimple class by the root-sum product formula.
pub fn primary_on_rss(ctx: &FieldCtx, f: &PolyQ, lam: &Partition, target: &ClassIndex) -> Result<CyclotomicSum> {
    primary_on_rss_with_ell(ctx, f, ctx.ell_of(f)?, lam, target)
}

/// As [`primary_on_rss`] with an explicit choice of `ℓ_f`.
pub fn primary_on_rss_with_ell(
    ctx: &FieldCtx,
    f: &PolyQ,
    ell_f: u64,
    lam: &Partition,
    target: &ClassIndex,
) -> Result<CyclotomicSum> {
    if !target.is_regular_semisimple() {
        return Err(Error::NotRegularSemisimple);
    }
    let n = target.norm() as u64;
    let d = f.degree() as u64;
    if d == 0 || lam.size() as u64 * d != n {
        return Err(Error::SizeMismatch(format!("|{lam}|·{d} != {n}")));
    }
    let modulus = ctx.m;
    let mu = target.cycle_type();
    if mu.parts().iter().any(|&p| p as u64 % d != 0) {
        return Ok(CyclotomicSum::zero(modulus));
    }
    let mu_t = Partition::new(mu.parts().iter().map(|&p| p / d as u32).collect());
    let chi = mn_character(lam, &mu_t)?;
    if chi == 0 {
        return Ok(CyclotomicSum::zero(modulus));
    }
    let q = ctx.q();
    let qd = arith::big_pow(q, d);
    let mut value = CyclotomicSum::from_int(modulus, chi * arith::sign_pow(((n / d) * (d - 1)) as i64));
    for (h, _) in target.entries() {
        let e = h.degree() as u64;
        let mt = e / d;
        let power = (arith::q_int(mt, &qd) * BigInt::from(ell_f)) % BigInt::from(modulus);
        let power: u64 = power.try_into().expect("reduced below M");
        let base = ctx.subfield_power(e, ctx.ell_of(h)?);
        let mut s = CyclotomicSum::zero(modulus);
        for j in 0..e {
            let qj = arith::mod_pow(q, j, modulus);
            s.add_term(mulmod3(base, qj, power, modulus), BigRational::one());
        }
        value = value.mul(&s).scale(&BigRational::new(BigInt::one(), BigInt::from(mt)));
    }
    Ok(value)
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub q: u64,
    pub n: usize,
    pub classes: Vec<ClassIndex>,
    pub class_sizes: Vec<BigInt>,
    pub characters: Vec<ClassIndex>,
    pub values: Vec<Vec<CyclotomicSum>>,
    /// Column of the identity matrix.
    pub identity_class: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub rows_checked: usize,
    pub columns_checked: usize,
    pub passed: bool,
}

impl CharacterTable {
    /// Exact row and column orthogonality.
    pub fn verify_orthogonality(&self) -> Result<OrthogonalityReport> {
        let gamma = gamma_n(self.q, self.n as u64);
        let k = self.classes.len();
        let conj: Vec<Vec<CyclotomicSum>> =
            self.values.iter().map(|r| r.iter().map(|v| v.conj()).collect()).collect();
        for a in 0..self.values.len() {
            for b in a..self.values.len() {
                let mut s = CyclotomicSum::zero(1);
                for c in 0..k {
                    let term = self.values[a][c]
                        .mul(&conj[b][c])
                        .scale(&BigRational::from_integer(self.class_sizes[c].clone()));
                    s.add_assign(&term);
                }
                let expect = if a == b { gamma.clone() } else { BigInt::zero() };
                let want = CyclotomicSum::from_rational(1, BigRational::from_integer(expect));
                if !s.try_eq(&want)? {
                    return Err(Error::OrthogonalityFailure(
                        self.characters[a].to_string(),
                        self.characters[b].to_string(),
                    ));
                }
            }
        }
        for c in 0..k {
            for e in c..k {
                let mut s = CyclotomicSum::zero(1);
                for r in 0..self.values.len() {
                    s.add_assign(&self.values[r][c].mul(&conj[r][e]));
                }
                let expect = if c == e {
                    BigRational::new(gamma.clone(), self.class_sizes[c].clone())
                } else {
                    BigRational::zero()
                };
                if !s.try_eq(&CyclotomicSum::from_rational(1, expect))? {
                    return Err(Error::OrthogonalityFailure(
                        format!("class {}", self.classes[c]),
                        format!("class {}", self.classes[e]),
                    ));
                }
            }
        }
        Ok(OrthogonalityReport { rows_checked: self.values.len(), columns_checked: k, passed: true })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("character");
        for c in &self.classes {
            out.push(',');
            out.push_str(&csv_field(&c.to_string()));
        }
        out.push('\n');
        for (idx, row) in self.characters.iter().zip(&self.values) {
            out.push_str(&csv_field(&idx.to_string()));
            for v in row {
                out.push(',');
                out.push_str(&csv_field(&v.pretty()));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "n": self.n,
            "classes": self.classes.iter().zip(&self.class_sizes).map(|(c, s)| serde_json::json!({
                "index": c.to_json_value(),
                "label": c.to_string(),
                "size": s.to_string(),
            })).collect::<Vec<_>>(),
            "rows": self.characters.iter().zip(&self.values).map(|(c, row)| serde_json::json!({
                "index": c.to_json_value(),
                "label": c.to_string(),
                "values": row.iter().map(|v| {
                    let shown = v.display_form().unwrap_or_else(|_| v.clone());
                    let mut j = serde_json::to_value(shown.to_json()).expect("serializable");
                    j["pretty"] = serde_json::Value::String(shown.to_string());
                    j
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', ';', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> PolyQ {
        PolyQ::from_coeffs(c.to_vec())
    }
    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }
    fn green(q: u64, n: u32) -> GreenCtx {
        GreenCtx::new(Arc::new(FieldCtx::new(q, n).unwrap()))
    }

    #[test]
    fn degree_examples() {
        let f1 = p(&[1, 1]);
        let f3 = p(&[1, 0, 1, 1]);
        assert_eq!(char_degree(2, &ClassIndex::primary(f1.clone(), pt(&[2, 1])), 3).unwrap(), BigInt::from(6));
        assert_eq!(char_degree(2, &ClassIndex::primary(f1.clone(), pt(&[3])), 3).unwrap(), BigInt::from(1));
        assert_eq!(char_degree(2, &ClassIndex::primary(f1, pt(&[1, 1, 1])), 3).unwrap(), BigInt::from(8));
        assert_eq!(char_degree(2, &ClassIndex::primary(f3, pt(&[1])), 3).unwrap(), BigInt::from(3));
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        assert_eq!(deg_ndr(2, 3, 1, 0).unwrap(), int(1));
        assert_eq!(deg_ndr(2, 3, 1, 1).unwrap(), int(6));
        assert_eq!(deg_ndr(2, 3, 3, 0).unwrap(), int(3));
        assert!(deg_ndr(2, 3, 2, 0).is_err());
    }

    #[test]
    fn deg_ndr_matches_char_degree_on_hooks() {
        for q in [2u64, 3, 4] {
            let fq = crate::field_tower::Fq::new(crate::field_tower::PrimePower::new(q).unwrap()).unwrap();
            for n in 1..=4u64 {
                for d in arith::divisors(n) {
                    let f = crate::poly_irr::enumerate_irreducibles(&fq, d as usize).unwrap()[0].clone();
                    for r in 0..n / d {
                        let idx = ClassIndex::primary(f.clone(), Partition::hook((n / d) as u32, r as u32));
                        let a = char_degree(q, &idx, n as usize).unwrap();
                        assert_eq!(deg_ndr(q, n, d, r).unwrap(), BigRational::from_integer(a));
                    }
                }
            }
        }
    }

    #[test]
    fn p_char_on_small_group() {
        let g = green(2, 2);
        // b = 0 on a degree-2 primary class: 2·κ((1), 4) = 2
        let vals = g.p_char(2, 0).unwrap();
        let data = g.group(2).unwrap();
        let ell = data.class_id(&ClassIndex::primary(p(&[1, 1, 1]), pt(&[1]))).unwrap();
        assert_eq!(vals[ell].to_integer().unwrap(), Some(BigInt::from(2)));
        // on the identity class of GL_2: κ((1,1), 2) · 1 = -1
        let id = data.class_id(&ClassIndex::primary(p(&[1, 1]), pt(&[1, 1]))).unwrap();
        assert_eq!(vals[id].to_integer().unwrap(), Some(BigInt::from(-1)));
    }

    #[test]
    fn gl2f2_table_is_orthogonal() {
        let g = green(2, 2);
        let t = g.character_table().unwrap();
        assert_eq!(t.classes.len(), 3);
        assert!(t.verify_orthogonality().unwrap().passed);
        let mut bad = t.clone();
        bad.values[0][1] = bad.values[0][1].add(&CyclotomicSum::from_int(3, 1));
        assert!(matches!(bad.verify_orthogonality(), Err(Error::OrthogonalityFailure(..))));
    }

    #[test]
    fn induction_with_trivial_factor_is_permutation_character() {
        let g = green(2, 2);
        let one = Arc::new(vec![CyclotomicSum::one(g.field.m)]);
        let ind = g.induce(&[1, 1], &[one.clone(), one]).unwrap();
        let data = g.group(2).unwrap();
        // permutation character on lines of F_2^2: 3 at identity, 1 at a transvection, 0 on the 3-cycle
        let id = data.class_id(&ClassIndex::primary(p(&[1, 1]), pt(&[1, 1]))).unwrap();
        let tr = data.class_id(&ClassIndex::primary(p(&[1, 1]), pt(&[2]))).unwrap();
        let el = data.class_id(&ClassIndex::primary(p(&[1, 1, 1]), pt(&[1]))).unwrap();
        assert_eq!(ind[id].to_integer().unwrap(), Some(BigInt::from(3)));
        assert_eq!(ind[tr].to_integer().unwrap(), Some(BigInt::from(1)));
        assert_eq!(ind[el].to_integer().unwrap(), Some(BigInt::from(0)));
    }

    #[test]
    fn steinberg_on_rss() {
        let g = green(3, 2);
        let data = g.group(2).unwrap();
        let z1 = p(&[2, 1]);
        for lam in partitions(2) {
            let chi = g.chi(&ClassIndex::primary(z1.clone(), lam.clone())).unwrap();
            for (c, idx) in data.classes.iter().enumerate() {
                if idx.is_regular_semisimple() {
                    let expect = mn_character(&lam, &idx.cycle_type()).unwrap();
                    assert_eq!(chi[c].to_integer().unwrap(), Some(BigInt::from(expect)));
                }
            }
        }
    }

    #[test]
    fn primary_formula_divisibility_clause() {
        let ctx = FieldCtx::new(2, 3).unwrap();
        let f2 = p(&[1, 1, 1]);
        let c0 = ClassIndex::from_pairs(vec![(p(&[1, 1, 1]), pt(&[1])), (p(&[1, 1]), pt(&[1]))]);
        // a degree-3 character on a (2,1) class
        let f3 = p(&[1, 0, 1, 1]);
        assert!(primary_on_rss(&ctx, &f3, &pt(&[1]), &c0).unwrap().is_zero_exact().unwrap());
        let _ = f2;
        let u1 = ClassIndex::primary(p(&[1, 1]), pt(&[1, 1, 1]));
        assert_eq!(primary_on_rss(&ctx, &f3, &pt(&[1]), &u1), Err(Error::NotRegularSemisimple));
    }
}
