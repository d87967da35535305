//! Matrices over `F_q`, conjugacy-class indices `Λ^g`, cycle types, and the
//! sizes of classes and cycle-type sets in `GL_n(F_q)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field_tower::Fq;
use crate::partitions_sym::{partitions, Partition};
use crate::poly_irr::{count_irreducibles, enumerate_irreducibles, factor_poly, PolyQ};

/// Default cap on the number of group elements enumerated.
pub const GROUP_BUDGET: u64 = 1_000_000;

/// Square matrix with `F_q` codes, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixQ {
    n: usize,
    a: Vec<u32>,
}

impl MatrixQ {
    pub fn zero(n: usize) -> Self {
        MatrixQ { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::SizeMismatch("matrix rows must have length n".into()));
        }
        Ok(MatrixQ { n, a: rows.concat() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.a[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.a.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> &[u32] {
        &self.a
    }

    pub fn mul(&self, other: &Self, fq: &Fq) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out.a[idx] = fq.add(out.a[idx], fq.mul(x, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self, fq: &Fq) -> Self {
        MatrixQ { n: self.n, a: self.a.iter().zip(&other.a).map(|(&x, &y)| fq.add(x, y)).collect() }
    }

    pub fn scale(&self, c: u32, fq: &Fq) -> Self {
        MatrixQ { n: self.n, a: self.a.iter().map(|&x| fq.mul(x, c)).collect() }
    }

    pub fn rank(&self, fq: &Fq) -> usize {
        let n = self.n;
        let mut m = self.a.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r * n + col] != 0) else { continue };
            for j in 0..n {
                m.swap(piv * n + j, rank * n + j);
            }
            let inv = fq.inv(m[rank * n + col]);
            for r in 0..n {
                if r == rank || m[r * n + col] == 0 {
                    continue;
                }
                let factor = fq.mul(m[r * n + col], inv);
                for j in 0..n {
                    m[r * n + j] = fq.sub(m[r * n + j], fq.mul(factor, m[rank * n + j]));
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, fq: &Fq) -> bool {
        self.rank(fq) == self.n
    }

    pub fn inverse(&self, fq: &Fq) -> Result<Self> {
        let n = self.n;
        let w = 2 * n;
        let mut m = vec![0u32; n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = self.get(i, j);
            }
            m[i * w + n + i] = 1;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * w + col] != 0).ok_or(Error::Singular)?;
            for j in 0..w {
                m.swap(piv * w + j, col * w + j);
            }
            let inv = fq.inv(m[col * w + col]);
            for j in 0..w {
                m[col * w + j] = fq.mul(m[col * w + j], inv);
            }
            for r in 0..n {
                if r == col || m[r * w + col] == 0 {
                    continue;
                }
                let factor = m[r * w + col];
                for j in 0..w {
                    m[r * w + j] = fq.sub(m[r * w + j], fq.mul(factor, m[col * w + j]));
                }
            }
        }
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, m[i * w + n + j]);
            }
        }
        Ok(out)
    }

    /// `f(g)` by Horner's rule.
    pub fn eval_poly(&self, f: &PolyQ, fq: &Fq) -> Self {
        let mut acc = Self::zero(self.n);
        for &c in f.coeffs().iter().rev() {
            acc = acc.mul(self, fq).add(&Self::identity(self.n).scale(c, fq), fq);
        }
        acc
    }

    /// Diagonal block `[start, start + size)`.
    pub fn block(&self, start: usize, size: usize) -> Self {
        let mut out = Self::zero(size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, self.get(start + i, start + j));
            }
        }
        out
    }

    /// True when every entry below the diagonal blocks of `ν` is zero.
    pub fn is_block_upper(&self, blocks: &[u32]) -> bool {
        let mut starts = Vec::with_capacity(blocks.len());
        let mut s = 0usize;
        for &b in blocks {
            starts.push(s);
            s += b as usize;
        }
        let block_of = |i: usize| starts.iter().rposition(|&st| st <= i).unwrap();
        for i in 0..self.n {
            let bi = block_of(i);
            for j in 0..starts[bi] {
                if self.get(i, j) != 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for MatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl Serialize for MatrixQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u32>>::deserialize(d)?;
        MatrixQ::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Characteristic polynomial via Hessenberg reduction.
pub fn char_poly(g: &MatrixQ, fq: &Fq) -> PolyQ {
    let n = g.n;
    let mut h = g.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h.get(i, j) != 0) else { continue };
        if piv != j + 1 {
            for c in 0..n {
                let (x, y) = (h.get(piv, c), h.get(j + 1, c));
                h.set(piv, c, y);
                h.set(j + 1, c, x);
            }
            for r in 0..n {
                let (x, y) = (h.get(r, piv), h.get(r, j + 1));
                h.set(r, piv, y);
                h.set(r, j + 1, x);
            }
        }
        let inv = fq.inv(h.get(j + 1, j));
        for i in j + 2..n {
            let u = fq.mul(h.get(i, j), inv);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let v = fq.sub(h.get(i, c), fq.mul(u, h.get(j + 1, c)));
                h.set(i, c, v);
            }
            for r in 0..n {
                let v = fq.add(h.get(r, j + 1), fq.mul(u, h.get(r, i)));
                h.set(r, j + 1, v);
            }
        }
    }
    // p_m = (z - h_mm) p_{m-1} - Σ_i h_{m-i,m} (∏ subdiagonal) p_{m-i-1}, 1-indexed
    let mut p: Vec<PolyQ> = vec![PolyQ::one()];
    for m in 1..=n {
        let mm = m - 1;
        let lin = PolyQ::from_coeffs(vec![fq.neg(h.get(mm, mm)), 1]);
        let mut cur = lin.mul(&p[m - 1], fq);
        let mut prod = 1u32;
        for i in 1..m {
            prod = fq.mul(prod, h.get(mm - i + 1, mm - i));
            let coef = fq.mul(h.get(mm - i, mm), prod);
            if coef != 0 {
                let term = p[m - i - 1].mul(&PolyQ::from_coeffs(vec![coef]), fq);
                cur = cur.sub(&term, fq);
            }
        }
        p.push(cur);
    }
    p.pop().unwrap()
}

/// Finitely supported map from monic irreducibles to nonempty partitions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClassIndex(BTreeMap<PolyQ, Partition>);

#[derive(Serialize, Deserialize)]
struct ClassIndexEntry {
    poly: Vec<u32>,
    partition: Partition,
}

impl ClassIndex {
    pub fn from_pairs(pairs: Vec<(PolyQ, Partition)>) -> Self {
        ClassIndex(pairs.into_iter().filter(|(_, p)| !p.is_empty()).collect())
    }

    pub fn primary(f: PolyQ, lam: Partition) -> Self {
        Self::from_pairs(vec![(f, lam)])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PolyQ, &Partition)> {
        self.0.iter()
    }

    pub fn get(&self, f: &PolyQ) -> Option<&Partition> {
        self.0.get(f)
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    /// `‖Λ‖ = Σ |Λ(f)| deg f`.
    pub fn norm(&self) -> usize {
        self.0.iter().map(|(f, l)| f.degree() * l.size() as usize).sum()
    }

    pub fn as_primary(&self) -> Option<(&PolyQ, &Partition)> {
        (self.0.len() == 1).then(|| self.0.iter().next().unwrap())
    }

    /// All partitions are `(1)`.
    pub fn is_regular_semisimple(&self) -> bool {
        self.0.values().all(|l| l.parts() == [1])
    }

    pub fn cycle_type(&self) -> Partition {
        let mut parts = Vec::new();
        for (f, l) in &self.0 {
            parts.extend(std::iter::repeat(f.degree() as u32).take(l.size() as usize));
        }
        Partition::new(parts)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let v: Vec<ClassIndexEntry> = self
            .0
            .iter()
            .map(|(f, l)| ClassIndexEntry { poly: f.coeffs().to_vec(), partition: l.clone() })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }

    /// Parses `[{"poly": [...], "partition": [...]}, ...]`; polynomials must be
    /// monic with coefficients below `q` and appear at most once.
    pub fn parse_json(text: &str, q: u64) -> Result<Self> {
        let v: Vec<ClassIndexEntry> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut map = BTreeMap::new();
        for e in v {
            if e.poly.iter().any(|&c| c as u64 >= q) {
                return Err(Error::Parse("coefficient out of range".into()));
            }
            let f = PolyQ::from_coeffs(e.poly);
            if !f.is_monic() || f.degree() == 0 || f.constant_term() == 0 {
                return Err(Error::Parse(format!("{f} is not an admissible support polynomial")));
            }
            if e.partition.is_empty() {
                continue;
            }
            if map.insert(f.clone(), e.partition).is_some() {
                return Err(Error::Parse(format!("{f} listed twice")));
            }
        }
        Ok(ClassIndex(map))
    }
}

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.0.iter().map(|(p, l)| format!("{p}↦{l}")).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn kernel_dim(m: &MatrixQ, fq: &Fq) -> usize {
    m.n() - m.rank(fq)
}

/// `Λ^g` from kernel dimensions of `f(g)^i`.
pub fn class_index(g: &MatrixQ, fq: &Fq) -> Result<ClassIndex> {
    if !g.is_invertible(fq) {
        return Err(Error::Singular);
    }
    let cp = char_poly(g, fq);
    let mut pairs = Vec::new();
    for (f, mult) in factor_poly(fq, &cp)? {
        let d = f.degree();
        let fg = g.eval_poly(&f, fq);
        let mut power = fg.clone();
        let mut prev = 0usize;
        let mut conj = Vec::new();
        loop {
            let k = kernel_dim(&power, fq);
            conj.push(((k - prev) / d) as u32);
            prev = k;
            if k == mult as usize * d {
                break;
            }
            power = power.mul(&fg, fq);
        }
        pairs.push((f, Partition::new(conj).conjugate()));
    }
    Ok(ClassIndex::from_pairs(pairs))
}

pub fn cycle_type(g: &MatrixQ, fq: &Fq) -> Result<Partition> {
    if !g.is_invertible(fq) {
        return Err(Error::Singular);
    }
    let mut parts = Vec::new();
    for (f, m) in factor_poly(fq, &char_poly(g, fq))? {
        parts.extend(std::iter::repeat(f.degree() as u32).take(m as usize));
    }
    Ok(Partition::new(parts))
}

pub fn is_regular_semisimple(g: &MatrixQ, fq: &Fq) -> Result<bool> {
    Ok(class_index(g, fq)?.is_regular_semisimple())
}

pub fn is_regular_elliptic(g: &MatrixQ, fq: &Fq) -> Result<bool> {
    if !g.is_invertible(fq) {
        return Err(Error::Singular);
    }
    let f = factor_poly(fq, &char_poly(g, fq))?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

/// `γ_n(q) = |GL_n(F_q)|`.
pub fn gamma_n(q: u64, n: u64) -> BigInt {
    let qn = arith::big_pow(q, n);
    (0..n).fold(BigInt::one(), |acc, i| acc * (&qn - arith::big_pow(q, i)))
}

/// Class size from the centralizer-order formula in terms of `s_i(Λ(f)')`.
pub fn class_size(q: u64, idx: &ClassIndex, n: usize) -> Result<BigInt> {
    if idx.norm() != n {
        return Err(Error::NormMismatch { expected: n as u64, found: idx.norm() as u64 });
    }
    let mut den = BigInt::one();
    for (f, lam) in idx.entries() {
        let t = arith::big_pow(q, f.degree() as u64);
        let conj = lam.conjugate();
        for (i, m) in lam.multiplicities() {
            let s = conj.partial_sum(i as usize) as u64;
            for j in 1..=m as u64 {
                den *= num_traits::pow(t.clone(), s as usize) - num_traits::pow(t.clone(), (s - j) as usize);
            }
        }
    }
    let g = gamma_n(q, n as u64);
    if !(&g % &den).is_zero() {
        return Err(Error::InexactDivision(format!("γ_{n}({q}) by centralizer of {idx}")));
    }
    Ok(g / den)
}

/// `#CT^□_μ(q)`.
pub fn ct_box_size(q: u64, mu: &Partition) -> BigInt {
    let n = mu.size() as u64;
    let mut den = BigInt::one();
    for &p in mu.parts() {
        den *= arith::big_pow(q, p as u64) - 1;
    }
    let mut count = gamma_n(q, n) / den;
    for (i, m) in mu.multiplicities() {
        let avail = count_irreducibles(q, i as u64);
        count *= binomial_big(&avail, m as u64);
    }
    count
}

fn binomial_big(n: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    if acc < BigInt::zero() {
        BigInt::zero()
    } else {
        acc
    }
}

/// Every index of norm `n`, sorted.
pub fn enumerate_class_indices(fq: &Fq, n: usize) -> Result<Vec<ClassIndex>> {
    let mut polys = Vec::new();
    for d in 1..=n {
        polys.extend(enumerate_irreducibles(fq, d)?.iter().cloned());
    }
    fn rec(
        polys: &[PolyQ],
        i: usize,
        remaining: usize,
        cur: &mut Vec<(PolyQ, Partition)>,
        out: &mut Vec<ClassIndex>,
    ) {
        if remaining == 0 {
            out.push(ClassIndex::from_pairs(cur.clone()));
            return;
        }
        if i == polys.len() {
            return;
        }
        rec(polys, i + 1, remaining, cur, out);
        let d = polys[i].degree();
        for size in 1..=remaining / d {
            for lam in partitions(size as u32) {
                cur.push((polys[i].clone(), lam));
                rec(polys, i + 1, remaining - size * d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&polys, 0, n, &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

/// All of `GL_n(F_q)` in lexicographic order of row-major codes.
pub fn enumerate_group(fq: &Fq, n: usize, budget: u64) -> Result<Vec<MatrixQ>> {
    let size = gamma_n(fq.q(), n as u64);
    if size > BigInt::from(budget) {
        return Err(Error::GroupTooLarge(size.to_string()));
    }
    let q = fq.q();
    let vectors: Vec<Vec<u32>> = (0..q.pow(n as u32))
        .map(|k| {
            let mut v = vec![0u32; n];
            let mut r = k;
            for slot in v.iter_mut().rev() {
                *slot = (r % q) as u32;
                r /= q;
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    fn rec(fq: &Fq, n: usize, vectors: &[Vec<u32>], rows: &mut Vec<Vec<u32>>, out: &mut Vec<MatrixQ>) {
        if rows.len() == n {
            out.push(MatrixQ::from_rows(rows).unwrap());
            return;
        }
        for v in vectors {
            rows.push(v.clone());
            if rank_of_rows(rows, fq, n) == rows.len() {
                rec(fq, n, vectors, rows, out);
            }
            rows.pop();
        }
    }
    rec(fq, n, &vectors, &mut rows, &mut out);
    Ok(out)
}

fn rank_of_rows(rows: &[Vec<u32>], fq: &Fq, n: usize) -> usize {
    let mut m = MatrixQ::zero(n);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m.rank(fq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::PrimePower;
    use crate::poly_irr::{companion_matrix, is_squarefree, rcf_from_index};
    use rand::{Rng, SeedableRng};

    fn fq(q: u64) -> Fq {
        Fq::new(PrimePower::new(q).unwrap()).unwrap()
    }
    fn p(c: &[u32]) -> PolyQ {
        PolyQ::from_coeffs(c.to_vec())
    }
    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }
    fn m(rows: &[&[u32]]) -> MatrixQ {
        MatrixQ::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn char_poly_examples() {
        let f2 = fq(2);
        assert_eq!(char_poly(&MatrixQ::identity(3), &f2), p(&[1, 1]).pow(3, &f2));
        let c0 = m(&[&[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(char_poly(&c0, &f2), p(&[1, 0, 0, 1]));
        let f5 = fq(5);
        for h in [p(&[2, 3, 0, 1]), p(&[1, 4, 1]), p(&[3, 1]), p(&[1, 2, 3, 4, 1])] {
            assert_eq!(char_poly(&companion_matrix(&f5, &h).unwrap(), &f5), h);
        }
    }

    #[test]
    fn char_poly_is_conjugation_invariant() {
        let f3 = fq(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rand_mat = |rng: &mut rand_chacha::ChaCha8Rng| {
                let rows: Vec<Vec<u32>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect()).collect();
                MatrixQ::from_rows(&rows).unwrap()
            };
            let g = rand_mat(&mut rng);
            let x = rand_mat(&mut rng);
            if !x.is_invertible(&f3) {
                continue;
            }
            let conj = x.mul(&g, &f3).mul(&x.inverse(&f3).unwrap(), &f3);
            assert_eq!(char_poly(&g, &f3), char_poly(&conj, &f3));
        }
    }

    #[test]
    fn class_index_examples() {
        let f2 = fq(2);
        assert_eq!(
            class_index(&MatrixQ::identity(3), &f2).unwrap(),
            ClassIndex::primary(p(&[1, 1]), pt(&[1, 1, 1]))
        );
        let c0 = m(&[&[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            class_index(&c0, &f2).unwrap(),
            ClassIndex::from_pairs(vec![(p(&[1, 1, 1]), pt(&[1])), (p(&[1, 1]), pt(&[1]))])
        );
        let jordan = companion_matrix(&f2, &p(&[1, 0, 1])).unwrap();
        assert_eq!(class_index(&jordan, &f2).unwrap(), ClassIndex::primary(p(&[1, 1]), pt(&[2])));
        assert_eq!(class_index(&MatrixQ::zero(2), &f2), Err(Error::Singular));
    }

    #[test]
    fn cycle_type_and_predicates() {
        let f2 = fq(2);
        let c0 = m(&[&[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let e = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 1]]);
        assert_eq!(cycle_type(&c0, &f2).unwrap(), pt(&[2, 1]));
        assert_eq!(cycle_type(&e, &f2).unwrap(), pt(&[3]));
        assert_eq!(cycle_type(&MatrixQ::identity(3), &f2).unwrap(), pt(&[1, 1, 1]));
        assert!(is_regular_semisimple(&c0, &f2).unwrap());
        assert!(is_regular_semisimple(&e, &f2).unwrap());
        assert!(!is_regular_semisimple(&MatrixQ::identity(3), &f2).unwrap());
        assert!(is_regular_elliptic(&e, &f2).unwrap());
        assert!(!is_regular_elliptic(&c0, &f2).unwrap());
        assert!(!is_regular_elliptic(&MatrixQ::identity(2), &f2).unwrap());
    }

    #[test]
    fn class_size_examples() {
        let u2 = ClassIndex::primary(p(&[1, 1]), pt(&[2, 1]));
        assert_eq!(class_size(2, &u2, 3).unwrap(), BigInt::from(21));
        let id = ClassIndex::primary(p(&[1, 1]), pt(&[1, 1, 1]));
        assert_eq!(class_size(2, &id, 3).unwrap(), BigInt::from(1));
        let e = ClassIndex::primary(p(&[1, 0, 1, 1]), pt(&[1]));
        assert_eq!(class_size(2, &e, 3).unwrap(), BigInt::from(24));
        assert!(matches!(class_size(2, &e, 2), Err(Error::NormMismatch { .. })));
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_n(2, 2), BigInt::from(6));
        assert_eq!(gamma_n(2, 3), BigInt::from(168));
        assert_eq!(gamma_n(3, 2), BigInt::from(48));
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for (n, q) in [(2usize, 2u64), (2, 3), (3, 2), (2, 4), (3, 3), (4, 2)] {
            let f = fq(q);
            let total: BigInt = enumerate_class_indices(&f, n)
                .unwrap()
                .iter()
                .map(|l| class_size(q, l, n).unwrap())
                .sum();
            assert_eq!(total, gamma_n(q, n as u64), "n={n} q={q}");
        }
        assert_eq!(enumerate_class_indices(&fq(2), 3).unwrap().len(), 6);
        assert_eq!(enumerate_class_indices(&fq(2), 2).unwrap().len(), 3);
        assert_eq!(enumerate_class_indices(&fq(3), 2).unwrap().len(), 8);
    }

    #[test]
    fn rcf_roundtrip_on_all_indices() {
        for (n, q) in [(3usize, 2u64), (2, 3), (3, 3), (4, 2), (2, 4)] {
            let f = fq(q);
            for l in enumerate_class_indices(&f, n).unwrap() {
                let g = rcf_from_index(&f, &l, n).unwrap();
                assert_eq!(class_index(&g, &f).unwrap(), l);
            }
        }
    }

    #[test]
    fn ct_box_examples() {
        assert_eq!(ct_box_size(2, &pt(&[1, 1, 1])), BigInt::zero());
        assert_eq!(ct_box_size(2, &pt(&[3])), BigInt::from(48));
        assert_eq!(ct_box_size(2, &pt(&[2, 1])), BigInt::from(56));
    }

    #[test]
    fn cycle_type_sets_partition_group() {
        for (n, q) in [(3usize, 2u64), (2, 3), (3, 3)] {
            let f = fq(q);
            let mut by_type: BTreeMap<Partition, BigInt> = BTreeMap::new();
            for l in enumerate_class_indices(&f, n).unwrap() {
                *by_type.entry(l.cycle_type()).or_insert_with(BigInt::zero) += class_size(q, &l, n).unwrap();
            }
            assert_eq!(by_type.values().sum::<BigInt>(), gamma_n(q, n as u64));
            // box sizes from the closed form agree with class sums over rss classes
            for mu in partitions(n as u32) {
                let rss: BigInt = enumerate_class_indices(&f, n)
                    .unwrap()
                    .iter()
                    .filter(|l| l.cycle_type() == mu && l.is_regular_semisimple())
                    .map(|l| class_size(q, l, n).unwrap())
                    .sum();
                assert_eq!(rss, ct_box_size(q, &mu));
            }
        }
    }

    #[test]
    fn group_enumeration_and_three_way_rss_agreement() {
        let f2 = fq(2);
        assert_eq!(enumerate_group(&f2, 2, GROUP_BUDGET).unwrap().len(), 6);
        let f3 = fq(3);
        assert_eq!(enumerate_group(&f3, 2, GROUP_BUDGET).unwrap().len(), 48);
        assert!(matches!(enumerate_group(&fq(5), 3, GROUP_BUDGET), Err(Error::GroupTooLarge(_))));
        let g3 = enumerate_group(&f2, 3, GROUP_BUDGET).unwrap();
        assert_eq!(g3.len(), 168);
        for g in &g3 {
            let idx = class_index(g, &f2).unwrap();
            let sq = is_squarefree(&f2, &char_poly(g, &f2)).unwrap();
            assert_eq!(idx.is_regular_semisimple(), sq);
            assert_eq!(is_regular_semisimple(g, &f2).unwrap(), sq);
        }
    }

    #[test]
    fn class_index_conjugation_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (n, q) in [(3usize, 2u64), (2, 3)] {
            let f = fq(q);
            let group = enumerate_group(&f, n, GROUP_BUDGET).unwrap();
            for _ in 0..200 {
                let g = &group[rng.gen_range(0..group.len())];
                let x = &group[rng.gen_range(0..group.len())];
                let c = x.mul(g, &f).mul(&x.inverse(&f).unwrap(), &f);
                assert_eq!(class_index(&c, &f).unwrap(), class_index(g, &f).unwrap());
            }
        }
    }

    #[test]
    fn class_index_json() {
        let l = ClassIndex::from_pairs(vec![(p(&[1, 1, 1]), pt(&[1])), (p(&[1, 1]), pt(&[1]))]);
        let text = l.to_json_value().to_string();
        assert_eq!(ClassIndex::parse_json(&text, 2).unwrap(), l);
        assert!(ClassIndex::parse_json(r#"[{"poly":[1,2],"partition":[1]}]"#, 2).is_err());
        assert!(ClassIndex::parse_json(r#"[{"poly":[0,1],"partition":[1]}]"#, 2).is_err());
        assert!(ClassIndex::parse_json(r#"[{"poly":[1,1],"partition":[1,2]}]"#, 2).is_err());
    }

    #[test]
    fn block_upper_check() {
        let g = m(&[&[1, 1, 1], &[0, 1, 1], &[0, 1, 1]]);
        assert!(g.is_block_upper(&[1, 2]));
        assert!(!g.is_block_upper(&[2, 1]));
        assert_eq!(g.block(1, 2), m(&[&[1, 1], &[1, 1]]));
    }
}
