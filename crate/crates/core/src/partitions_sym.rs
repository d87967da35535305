//! Partitions, symmetric-group characters by the Murnaghan–Nakayama rule and
//! Stanley's count of factorizations into n-cycles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Weakly decreasing positive parts; the empty partition is allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] < w[1]) || v.contains(&0) {
            return Err(Error::Parse(format!("{v:?} is not a partition")));
        }
        Ok(Partition(v))
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl Partition {
    /// Sorts and drops zero parts.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The hook `(n - r, 1^r)`.
    pub fn hook(n: u32, r: u32) -> Self {
        assert!(r < n.max(1));
        let mut v = vec![n - r];
        v.extend(std::iter::repeat(1).take(r as usize));
        Partition(v)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts `ℓ(μ)`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `m_i(μ)`.
    pub fn multiplicity(&self, i: u32) -> u32 {
        self.0.iter().filter(|&&x| x == i).count() as u32
    }

    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &x in &self.0 {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    }

    /// `s_i(μ) = μ_1 + … + μ_i`.
    pub fn partial_sum(&self, i: usize) -> u32 {
        self.0.iter().take(i).sum()
    }

    pub fn conjugate(&self) -> Self {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|i| self.0.iter().filter(|&&x| x >= i).count() as u32).collect())
    }

    /// `dμ`.
    pub fn scale(&self, d: u32) -> Self {
        Partition(self.0.iter().map(|&x| x * d).collect())
    }

    /// `r` when the partition is the hook `(n - r, 1^r)`.
    pub fn hook_leg(&self) -> Option<u32> {
        let rest = self.0.get(1..)?;
        rest.iter().all(|&x| x == 1).then_some(rest.len() as u32)
    }

    pub fn has_distinct_parts(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }

    /// `z_μ = ∏ i^{m_i} m_i!`.
    pub fn z(&self) -> BigUint {
        self.multiplicities().into_iter().fold(BigUint::one(), |acc, (i, m)| {
            acc * BigUint::from(i).pow(m) * arith::factorial(m as u64)
        })
    }

    /// `b(λ) = Σ (i - 1) λ_i`.
    pub fn b_stat(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, &x)| i as u64 * x as u64).sum()
    }

    /// Parses `3,1`, `[3,1]`, `(3,1)`, `3 1`, or an empty string for `∅`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let t = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| t.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .unwrap_or(t);
        if t.len() > 4096 {
            return Err(Error::Parse("partition text too long".into()));
        }
        let mut parts = Vec::new();
        for tok in t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let v: u32 = tok.parse().map_err(|_| Error::Parse(format!("bad part {tok:?}")))?;
            if v == 0 || v > 1 << 16 {
                return Err(Error::Parse(format!("part {v} out of range")));
            }
            parts.push(v);
        }
        if parts.iter().map(|&x| x as u64).sum::<u64>() > 1 << 16 {
            return Err(Error::Parse("partition too large".into()));
        }
        Ok(Partition::new(parts))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All partitions of `n`, in reverse lexicographic order starting from `(n)`.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn z_of(mu: &Partition) -> BigUint {
    mu.z()
}

type MnMemo = Mutex<HashMap<(Vec<u32>, Vec<u32>), i64>>;

fn mn_memo() -> &'static MnMemo {
    static MEMO: OnceLock<MnMemo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `χ^λ_μ` by removing border strips of length `μ_1, μ_2, …` via bead moves on a beta-set.
pub fn mn_character(lam: &Partition, mu: &Partition) -> Result<i64> {
    if lam.size() != mu.size() {
        return Err(Error::SizeMismatch(format!("|{lam}| != |{mu}|")));
    }
    Ok(mn_rec(lam.parts(), mu.parts()))
}

fn mn_rec(lam: &[u32], mu: &[u32]) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lam.to_vec(), mu.to_vec());
    if let Some(&v) = mn_memo().lock().unwrap().get(&key) {
        return v;
    }
    let k = mu[0] as i64;
    let len = lam.len();
    // beta-set: β_i = λ_i + (len - 1 - i), strictly decreasing
    let beta: Vec<i64> = lam.iter().enumerate().map(|(i, &x)| x as i64 + (len - 1 - i) as i64).collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        let nb = b - k;
        if nb < 0 || beta.contains(&nb) {
            continue;
        }
        // height = number of beads strictly between nb and b
        let height = beta.iter().filter(|&&x| x > nb && x < b).count() as i64;
        let mut nbeta = beta.clone();
        nbeta[i] = nb;
        nbeta.sort_unstable_by(|a, b| b.cmp(a));
        let l = nbeta.len();
        let new_lam: Vec<u32> = nbeta
            .iter()
            .enumerate()
            .map(|(j, &x)| (x - (l - 1 - j) as i64) as u32)
            .filter(|&x| x > 0)
            .collect();
        total += arith::sign_pow(height) * mn_rec(&new_lam, &mu[1..]);
    }
    mn_memo().lock().unwrap().insert(key, total);
    total
}

/// `χ^λ_{(n)}`: `(-1)^r` on the hook `(n-r, 1^r)`, else 0.
pub fn hook_char_on_ncycle(n: u32, lam: &Partition) -> Result<i64> {
    if lam.size() != n {
        return Err(Error::SizeMismatch(format!("|{lam}| != {n}")));
    }
    Ok(match lam.hook_leg() {
        Some(r) => arith::sign_pow(r as i64),
        None => 0,
    })
}

/// `χ^λ_{(n-1,1)}` by the closed description in terms of shapes.
pub fn char_on_near_ncycle(n: u32, lam: &Partition) -> Result<i64> {
    if n < 3 {
        return Err(Error::RangeError(format!("n = {n} < 3")));
    }
    if lam.size() != n {
        return Err(Error::SizeMismatch(format!("|{lam}| != {n}")));
    }
    let p = lam.parts();
    if p.len() == 1 {
        return Ok(1);
    }
    if p.iter().all(|&x| x == 1) {
        return Ok(arith::sign_pow(n as i64));
    }
    // (n - r, 2, 1^{r-2}) with r ≥ 2
    if p.len() >= 2 && p[1] == 2 && p[2..].iter().all(|&x| x == 1) && p[0] >= 2 {
        let r = n - p[0];
        return Ok(arith::sign_pow(r as i64 - 1));
    }
    Ok(0)
}

/// Stanley's explicit hook value `χ^{(n-r,1^r)}_μ` as a sum over `ν ⊢ r`.
pub fn hook_char_explicit(mu: &Partition, r: u32) -> BigInt {
    let mut total = BigInt::zero();
    for nu in partitions(r) {
        let even: u32 = nu.multiplicities().iter().filter(|(i, _)| *i % 2 == 0).map(|(_, m)| m).sum();
        let mut term = arith::binomial_signed(mu.multiplicity(1) as i64 - 1, nu.multiplicity(1) as u64);
        for j in 2..=r {
            term *= BigInt::from(arith::binomial(mu.multiplicity(j) as u64, nu.multiplicity(j) as u64));
        }
        total += term * arith::sign_pow(even as i64);
    }
    total
}

/// `#C_μ = n!/z_μ`.
pub fn class_size_sn(mu: &Partition) -> BigUint {
    arith::factorial(mu.size() as u64) / mu.z()
}

fn stanley_with(n: u32, k: u32, mu: &Partition, hook_value: impl Fn(u32) -> BigInt) -> Result<BigInt> {
    if mu.size() != n || n == 0 || k == 0 {
        return Err(Error::SizeMismatch(format!("need μ ⊢ n = {n} and k ≥ 1")));
    }
    let nm1_fact = BigInt::from(arith::factorial(n as u64 - 1));
    let mut sum = BigRational::zero();
    for r in 0..n {
        let bin = BigInt::from(arith::binomial(n as u64 - 1, r as u64));
        let sign = arith::sign_pow(r as i64 * k as i64);
        let den = num_traits::pow(bin, k as usize - 1);
        sum += BigRational::new(hook_value(r) * sign, den);
    }
    let per_element = sum * BigRational::from_integer(num_traits::pow(nm1_fact, k as usize - 1))
        / BigRational::from_integer(BigInt::from(n));
    let total = per_element * BigRational::from_integer(BigInt::from(class_size_sn(mu)));
    arith::rat_to_int(&total).ok_or_else(|| Error::InexactResult(format!("g_{{{k},{mu}}}")))
}

/// `g_{k,μ}` for `S_n` via hook characters from the Murnaghan–Nakayama rule.
pub fn stanley_count(n: u32, k: u32, mu: &Partition) -> Result<BigInt> {
    stanley_with(n, k, mu, |r| {
        BigInt::from(mn_rec(Partition::hook(n, r).parts(), mu.parts()))
    })
}

/// Same count using the explicit hook formula.
pub fn stanley_count_explicit(n: u32, k: u32, mu: &Partition) -> Result<BigInt> {
    stanley_with(n, k, mu, |r| hook_char_explicit(mu, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn z_values() {
        assert_eq!(pt(&[1, 1, 1]).z(), BigUint::from(6u32));
        assert_eq!(pt(&[3]).z(), BigUint::from(3u32));
        assert_eq!(pt(&[2, 1]).z(), BigUint::from(2u32));
        assert_eq!(Partition::empty().z(), BigUint::one());
    }

    #[test]
    fn conjugate_and_scale() {
        assert_eq!(pt(&[2, 1]).conjugate(), pt(&[2, 1]));
        assert_eq!(pt(&[3]).conjugate(), pt(&[1, 1, 1]));
        assert_eq!(pt(&[2, 1]).scale(2), pt(&[4, 2]));
        for n in 0..8 {
            for p in partitions(n) {
                assert_eq!(p.conjugate().conjugate(), p);
            }
        }
        assert_eq!(pt(&[3, 2, 2]).partial_sum(2), 5);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30]);
        assert_eq!(partitions(3), vec![pt(&[3]), pt(&[2, 1]), pt(&[1, 1, 1])]);
    }

    #[test]
    fn mn_examples() {
        for mu in partitions(4) {
            assert_eq!(mn_character(&pt(&[4]), &mu).unwrap(), 1);
        }
        assert_eq!(mn_character(&pt(&[2, 1]), &pt(&[3])).unwrap(), -1);
        assert_eq!(mn_character(&pt(&[2, 1]), &pt(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(mn_character(&pt(&[2, 2]), &pt(&[3, 1])).unwrap(), -1);
        assert_eq!(mn_character(&pt(&[3, 2]), &pt(&[1; 5])).unwrap(), 5);
        assert!(mn_character(&pt(&[2]), &pt(&[1])).is_err());
    }

    #[test]
    fn column_orthogonality() {
        for n in 1..=6 {
            let ps = partitions(n);
            for mu in &ps {
                for nu in &ps {
                    let s: i64 = ps
                        .iter()
                        .map(|l| mn_character(l, mu).unwrap() * mn_character(l, nu).unwrap())
                        .sum();
                    let expect = if mu == nu { mu.z().try_into().unwrap() } else { 0i64 };
                    assert_eq!(s, expect);
                }
            }
        }
    }

    #[test]
    fn hook_values_match_mn() {
        for n in 1..=8 {
            for lam in partitions(n) {
                assert_eq!(hook_char_on_ncycle(n, &lam).unwrap(), mn_character(&lam, &pt(&[n])).unwrap());
            }
        }
        assert_eq!(hook_char_on_ncycle(4, &pt(&[2, 2])).unwrap(), 0);
        assert_eq!(hook_char_on_ncycle(5, &pt(&[1; 5])).unwrap(), 1);
    }

    #[test]
    fn near_ncycle_matches_mn() {
        for n in 3..=8 {
            for lam in partitions(n) {
                assert_eq!(
                    char_on_near_ncycle(n, &lam).unwrap(),
                    mn_character(&lam, &pt(&[n - 1, 1])).unwrap(),
                    "λ = {lam}"
                );
            }
        }
    }

    #[test]
    fn explicit_hook_formula_matches_mn() {
        for n in 1..=7 {
            for mu in partitions(n) {
                for r in 0..n {
                    let mn = mn_character(&Partition::hook(n, r), &mu).unwrap();
                    assert_eq!(hook_char_explicit(&mu, r), BigInt::from(mn), "μ={mu} r={r}");
                }
            }
        }
    }

    #[test]
    fn stanley_examples() {
        assert_eq!(stanley_count(2, 2, &pt(&[1, 1])).unwrap(), BigInt::from(1));
        assert_eq!(stanley_count(3, 2, &pt(&[3])).unwrap(), BigInt::from(2));
        assert_eq!(stanley_count(3, 1, &pt(&[3])).unwrap(), BigInt::from(2));
        for n in 1..=6 {
            for k in 1..=3 {
                for mu in partitions(n) {
                    assert_eq!(stanley_count(n, k, &mu), stanley_count_explicit(n, k, &mu));
                }
            }
        }
    }

    #[test]
    fn near_ncycle_count_vanishes_unless_both_even() {
        for n in 3..=6u32 {
            for k in 1..=4u32 {
                let g = stanley_count(n, k, &pt(&[n - 1, 1])).unwrap();
                if n % 2 == 1 || k % 2 == 1 {
                    assert!(g.is_zero(), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(Partition::parse("3,1").unwrap(), pt(&[3, 1]));
        assert_eq!(Partition::parse("[1, 3]").unwrap(), pt(&[3, 1]));
        assert_eq!(Partition::parse("").unwrap(), Partition::empty());
        assert!(Partition::parse("3,x").is_err());
        assert!(Partition::parse("0").is_err());
        let j: Partition = serde_json::from_str("[3,2,2]").unwrap();
        assert_eq!(j, pt(&[3, 2, 2]));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
