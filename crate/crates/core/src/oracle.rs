//! Ground truth by brute force on tiny groups: class-algebra structure
//! constants, tuple counts by convolution over classes, the symmetric-group
//! baseline, and character-table verification.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CyclotomicSum;
use crate::error::{Error, Result};
use crate::green_chars::{CharacterTable, GreenCtx};
use crate::matrix_group::{gamma_n, ClassIndex, MatrixQ};
use crate::partitions_sym::Partition;
use crate::poly_irr::PolyQ;

/// Largest group order accepted for structure constants.
pub const ALGEBRA_BUDGET: u64 = 10_000;

pub struct ClassAlgebra {
    pub q: u64,
    pub n: usize,
    pub classes: Vec<ClassIndex>,
    pub sizes: Vec<BigInt>,
    pub reps: Vec<MatrixQ>,
    /// `a[C][D][E] = #{(c, d) ∈ C × D : cd = e_E}` for the fixed representative `e_E`.
    pub a: Vec<Vec<Vec<u64>>>,
}

pub fn build_class_algebra(green: &GreenCtx) -> Result<ClassAlgebra> {
    let order = gamma_n(green.q(), green.n as u64);
    if order > BigInt::from(ALGEBRA_BUDGET) {
        return Err(Error::GroupTooLarge(order.to_string()));
    }
    let data = green.group(green.n)?;
    let fq = &green.field.fq;
    let inverse_class: Vec<(usize, MatrixQ)> = data
        .elements
        .iter()
        .zip(&data.element_class)
        .map(|(x, &c)| x.inverse(fq).map(|inv| (c, inv)))
        .collect::<Result<_>>()?;
    let k = data.classes.len();
    // one slab per target class, merged in class order
    let slabs: Vec<Vec<Vec<u64>>> = data
        .reps
        .par_iter()
        .map(|e| {
            let mut slab = vec![vec![0u64; k]; k];
            for (c, inv) in &inverse_class {
                let d = data.class_of[&inv.mul(e, fq)];
                slab[*c][d] += 1;
            }
            slab
        })
        .collect();
    let mut a = vec![vec![vec![0u64; k]; k]; k];
    for (e, slab) in slabs.into_iter().enumerate() {
        for c in 0..k {
            for d in 0..k {
                a[c][d][e] = slab[c][d];
            }
        }
    }
    Ok(ClassAlgebra {
        q: green.q(),
        n: green.n,
        classes: data.classes.clone(),
        sizes: data.sizes.clone(),
        reps: data.reps.clone(),
        a,
    })
}

fn is_regular_elliptic_index(idx: &ClassIndex, n: usize) -> bool {
    idx.as_primary().is_some_and(|(f, lam)| f.degree() == n && lam.parts() == [1])
}

impl ClassAlgebra {
    /// Indicator of the regular elliptic classes.
    pub fn elliptic_mask(&self) -> Vec<bool> {
        self.classes.iter().map(|c| is_regular_elliptic_index(c, self.n)).collect()
    }

    /// Number of `k`-tuples from `CT_(n)` whose product equals a fixed element of each class.
    pub fn tuple_distribution(&self, k: u32) -> Vec<BigInt> {
        let mask = self.elliptic_mask();
        let nc = self.classes.len();
        let mut u: Vec<BigInt> = mask.iter().map(|&m| if m { BigInt::one() } else { BigInt::zero() }).collect();
        for _ in 1..k {
            let mut next = vec![BigInt::zero(); nc];
            for (e, slot) in next.iter_mut().enumerate() {
                for c in 0..nc {
                    if u[c].is_zero() {
                        continue;
                    }
                    let hits: u64 = (0..nc).filter(|&d| mask[d]).map(|d| self.a[c][d][e]).sum();
                    if hits != 0 {
                        *slot += &u[c] * hits;
                    }
                }
            }
            u = next;
        }
        u
    }

    fn in_target(&self, e: usize, mu: &Partition, box_count: bool) -> bool {
        let idx = &self.classes[e];
        &idx.cycle_type() == mu && (!box_count || idx.is_regular_semisimple())
    }
}

/// `g_{k,μ}(q)` or `g^□_{k,μ}(q)` by convolution over classes.
pub fn brute_g(alg: &ClassAlgebra, k: u32, mu: &Partition, box_count: bool) -> Result<BigInt> {
    if mu.size() as usize != alg.n || k == 0 {
        return Err(Error::SizeMismatch(format!("need μ ⊢ {} and k ≥ 1", alg.n)));
    }
    let u = alg.tuple_distribution(k);
    Ok((0..alg.classes.len())
        .filter(|&e| alg.in_target(e, mu, box_count))
        .map(|e| &u[e] * &alg.sizes[e])
        .sum())
}

/// Literal pair enumeration, for cross-checking `brute_g` at `k = 2`.
pub fn brute_g_pairs(green: &GreenCtx, mu: &Partition, box_count: bool) -> Result<BigInt> {
    let data = green.group(green.n)?;
    let fq = &green.field.fq;
    let ell: Vec<&MatrixQ> = data
        .elements
        .iter()
        .zip(&data.element_class)
        .filter(|(_, &c)| is_regular_elliptic_index(&data.classes[c], green.n))
        .map(|(x, _)| x)
        .collect();
    let mut count = 0u64;
    for a in &ell {
        for b in &ell {
            let idx = &data.classes[data.class_of[&a.mul(b, fq)]];
            if &idx.cycle_type() == mu && (!box_count || idx.is_regular_semisimple()) {
                count += 1;
            }
        }
    }
    Ok(BigInt::from(count))
}

/// Frobenius' formula evaluated with a complete character table.
pub fn frobenius_from_table(table: &CharacterTable, k: u32, mu: &Partition, box_count: bool) -> Result<BigInt> {
    let nc = table.classes.len();
    let mut total = CyclotomicSum::zero(1);
    for row in &table.values {
        let mut s_re = CyclotomicSum::zero(1);
        let mut s_mu = CyclotomicSum::zero(1);
        for c in 0..nc {
            let idx = &table.classes[c];
            let size = BigRational::from_integer(table.class_sizes[c].clone());
            if is_regular_elliptic_index(idx, table.n) {
                s_re.add_assign(&row[c].scale(&size));
            }
            if &idx.cycle_type() == mu && (!box_count || idx.is_regular_semisimple()) {
                s_mu.add_assign(&row[c].conj().scale(&size));
            }
        }
        let degree = row[table.identity_class]
            .to_rational()?
            .ok_or_else(|| Error::InexactResult("irrational degree".into()))?;
        let term = s_re.pow(k as u64).mul(&s_mu).scale(&crate::arith::rat_pow(&degree, 1 - k as i64));
        total.add_assign(&term);
    }
    let value = total
        .to_rational()?
        .ok_or_else(|| Error::InexactResult("irrational Frobenius sum".into()))?
        / BigRational::from_integer(gamma_n(table.q, table.n as u64));
    crate::arith::rat_to_int(&value).ok_or_else(|| Error::InexactDivision(format!("{value}")))
}

/// Counts `k`-tuples of `n`-cycles in `S_n` whose product has cycle type `μ`.
pub fn brute_sn_g(n: u32, k: u32, mu: &Partition) -> Result<BigInt> {
    if n > 6 {
        return Err(Error::TooLarge(format!("S_{n} brute force is limited to n ≤ 6")));
    }
    if mu.size() != n || k == 0 {
        return Err(Error::SizeMismatch(format!("need μ ⊢ {n} and k ≥ 1")));
    }
    let perms = permutations(n as usize);
    let index: HashMap<Vec<u8>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let cycles: Vec<&Vec<u8>> = perms.iter().filter(|p| cycle_type_of(p).parts() == [n]).collect();
    let mut dist = vec![BigInt::zero(); perms.len()];
    for c in &cycles {
        dist[index[*c]] += 1;
    }
    for _ in 1..k {
        let mut next = vec![BigInt::zero(); perms.len()];
        for (i, m) in dist.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for c in &cycles {
                let prod: Vec<u8> = c.iter().map(|&j| perms[i][j as usize]).collect();
                next[index[&prod]] += m;
            }
        }
        dist = next;
    }
    Ok(perms
        .iter()
        .zip(&dist)
        .filter(|(p, _)| &cycle_type_of(p) == mu)
        .map(|(_, m)| m.clone())
        .sum())
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    fn heap(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k % 2 == 0 { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

fn cycle_type_of(p: &[u8]) -> Partition {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = p[j] as usize;
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts)
}

/// Expected entries: rows keyed by character index, columns by representative matrix.
#[derive(Debug, Clone)]
pub struct ExpectedTable {
    pub columns: Vec<MatrixQ>,
    pub rows: Vec<(ClassIndex, Vec<CyclotomicSum>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub character: String,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub orthogonal: bool,
    pub orthogonality_error: Option<String>,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.mismatches.is_empty()
    }
}

/// Orthogonality plus, when given, entrywise comparison with reference values.
pub fn verify_character_table(
    green: &GreenCtx,
    table: &CharacterTable,
    expected: Option<&ExpectedTable>,
) -> Result<TableReport> {
    let (orthogonal, orthogonality_error) = match table.verify_orthogonality() {
        Ok(r) => (r.passed, None),
        Err(Error::OrthogonalityFailure(a, b)) => (false, Some(format!("{a} vs {b}"))),
        Err(e) => return Err(e),
    };
    let mut mismatches = Vec::new();
    let mut compared = 0;
    if let Some(exp) = expected {
        let data = green.group(table.n)?;
        let cols = exp
            .columns
            .iter()
            .map(|m| data.class_of.get(m).copied().ok_or(Error::Singular))
            .collect::<Result<Vec<_>>>()?;
        for (idx, want) in &exp.rows {
            let Some(r) = table.characters.iter().position(|c| c == idx) else {
                mismatches.push(Mismatch {
                    character: idx.to_string(),
                    column: 0,
                    expected: "row present".into(),
                    found: "missing".into(),
                });
                continue;
            };
            for (j, (&c, w)) in cols.iter().zip(want).enumerate() {
                compared += 1;
                let got = &table.values[r][c];
                if !got.try_eq(w)? {
                    mismatches.push(Mismatch {
                        character: idx.to_string(),
                        column: j,
                        expected: w.pretty(),
                        found: got.pretty(),
                    });
                }
            }
        }
    }
    Ok(TableReport { orthogonal, orthogonality_error, compared, mismatches })
}

/// Reference character table of `GL_3(F_2)` with `ε_3` a root of `z^3 + z^2 + 1`.
///
/// Columns: identity, transvection, regular unipotent, companions of
/// `z^3+z^2+1` and `z^3+z+1`, and an element of order 3.
pub fn gl3f2_reference() -> ExpectedTable {
    let m = |rows: [[u32; 3]; 3]| MatrixQ::from_rows(&rows.map(|r| r.to_vec())).expect("3x3");
    let columns = vec![
        m([[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
        m([[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
        m([[0, 0, 1], [1, 0, 1], [0, 1, 1]]),
        m([[0, 0, 1], [1, 0, 0], [0, 1, 1]]),
        m([[0, 0, 1], [1, 0, 1], [0, 1, 0]]),
        m([[0, 1, 0], [1, 1, 0], [0, 0, 1]]),
    ];
    let p = |c: &[u32]| PolyQ::from_coeffs(c.to_vec());
    let pt = |v: &[u32]| Partition::new(v.to_vec());
    let int = |v: i64| CyclotomicSum::from_int(1, v);
    let sum7 = |e: [u64; 3]| {
        let mut s = CyclotomicSum::zero(7);
        for a in e {
            s.add_term(a, BigRational::one());
        }
        s
    };
    let f1 = p(&[1, 1]);
    let rows = vec![
        (ClassIndex::primary(f1.clone(), pt(&[1, 1, 1])), vec![int(8), int(0), int(0), int(1), int(1), int(-1)]),
        (ClassIndex::primary(f1.clone(), pt(&[2, 1])), vec![int(6), int(2), int(0), int(-1), int(-1), int(0)]),
        (ClassIndex::primary(f1.clone(), pt(&[3])), vec![int(1); 6]),
        (
            ClassIndex::primary(p(&[1, 0, 1, 1]), pt(&[1])),
            vec![int(3), int(-1), int(1), sum7([1, 2, 4]), sum7([3, 5, 6]), int(0)],
        ),
        (
            ClassIndex::primary(p(&[1, 1, 0, 1]), pt(&[1])),
            vec![int(3), int(-1), int(1), sum7([3, 5, 6]), sum7([1, 2, 4]), int(0)],
        ),
        (
            ClassIndex::from_pairs(vec![(f1, pt(&[1])), (p(&[1, 1, 1]), pt(&[1]))]),
            vec![int(7), int(-1), int(-1), int(0), int(0), int(1)],
        ),
    ];
    ExpectedTable { columns, rows }
}

/// A two-method comparison row.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub method_a: String,
    pub method_b: String,
    pub inputs: serde_json::Value,
    pub value_a: String,
    pub value_b: String,
    pub equal: bool,
}

impl CrossCheck {
    pub fn new(a: &str, b: &str, inputs: serde_json::Value, va: impl ToString, vb: impl ToString) -> Self {
        let (value_a, value_b) = (va.to_string(), vb.to_string());
        CrossCheck {
            method_a: a.into(),
            method_b: b.into(),
            inputs,
            equal: value_a == value_b,
            value_a,
            value_b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::FieldCtx;
    use crate::partitions_sym::partitions;
    use std::sync::Arc;

    fn green(q: u64, n: u32) -> GreenCtx {
        GreenCtx::new(Arc::new(FieldCtx::new(q, n).unwrap()))
    }
    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn class_counts() {
        assert_eq!(build_class_algebra(&green(2, 2)).unwrap().classes.len(), 3);
        assert_eq!(build_class_algebra(&green(2, 3)).unwrap().classes.len(), 6);
        assert_eq!(build_class_algebra(&green(3, 2)).unwrap().classes.len(), 8);
    }

    #[test]
    fn structure_constants_are_consistent() {
        let alg = build_class_algebra(&green(3, 2)).unwrap();
        let nc = alg.classes.len();
        for c in 0..nc {
            for d in 0..nc {
                let total: BigInt = (0..nc).map(|e| &alg.sizes[e] * alg.a[c][d][e]).sum();
                assert_eq!(total, &alg.sizes[c] * &alg.sizes[d]);
            }
        }
    }

    #[test]
    fn small_counts() {
        let alg = build_class_algebra(&green(2, 2)).unwrap();
        assert_eq!(brute_g(&alg, 2, &pt(&[2]), false).unwrap(), BigInt::from(2));
        assert_eq!(brute_g(&alg, 2, &pt(&[1, 1]), false).unwrap(), BigInt::from(2));
        assert_eq!(brute_sn_g(3, 2, &pt(&[3])).unwrap(), BigInt::from(2));
        assert_eq!(brute_sn_g(2, 2, &pt(&[1, 1])).unwrap(), BigInt::from(1));
        assert!(brute_sn_g(7, 2, &pt(&[7])).is_err());
    }

    #[test]
    fn convolution_matches_pairs() {
        for (q, n) in [(2u64, 2u32), (3, 2), (2, 3)] {
            let g = green(q, n);
            let alg = build_class_algebra(&g).unwrap();
            for mu in partitions(n) {
                for b in [false, true] {
                    assert_eq!(brute_g(&alg, 2, &mu, b).unwrap(), brute_g_pairs(&g, &mu, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn reference_table_and_negative_control() {
        let f = FieldCtx::pinned(2, 3, &PolyQ::from_coeffs(vec![1, 0, 1, 1])).unwrap();
        let g = GreenCtx::new(Arc::new(f));
        let t = g.character_table().unwrap();
        let r = verify_character_table(&g, &t, Some(&gl3f2_reference())).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.compared, 36);
        let mut swapped = gl3f2_reference();
        swapped.rows[3].1.swap(3, 4);
        assert!(!verify_character_table(&g, &t, Some(&swapped)).unwrap().passed());
    }
}
