use std::sync::Arc;

use glnq_core::counting::{closed_nu_n, count_auto, ct_n_size, Counter};
use glnq_core::cyclotomic::{CyclotomicJson, CyclotomicSum};
use glnq_core::field_tower::{FieldCtx, Fq, PrimePower};
use glnq_core::green_chars::GreenCtx;
use glnq_core::matrix_group::{enumerate_class_indices, ClassIndex};
use glnq_core::partitions_sym::{partitions, stanley_count, stanley_count_explicit, Partition};
use glnq_core::poly_irr::{count_irreducibles, enumerate_irreducibles, factor_poly, PolyQ};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn fq(q: u64) -> Fq {
    Fq::new(PrimePower::new(q).unwrap()).unwrap()
}

fn small_q() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])
}

fn cyclotomic() -> impl Strategy<Value = CyclotomicSum> {
    (1u64..40).prop_flat_map(|m| {
        prop::collection::vec((0..m, -5i64..6, 1i64..4), 0..6).prop_map(move |terms| {
            let mut s = CyclotomicSum::zero(m);
            for (a, num, den) in terms {
                s.add_term(a, BigRational::new(BigInt::from(num), BigInt::from(den)));
            }
            s
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_text_round_trip(parts in prop::collection::vec(1u32..9, 0..7)) {
        let p = Partition::new(parts);
        prop_assert_eq!(Partition::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn poly_text_round_trip(q in small_q(), raw in prop::collection::vec(0u32..9, 1..7)) {
        let mut c: Vec<u32> = raw.into_iter().map(|x| x % q as u32).collect();
        c.push(1);
        let f = PolyQ::from_coeffs(c);
        prop_assert_eq!(PolyQ::parse(&f.to_text(), q).unwrap(), f.clone());
        let arr = serde_json::to_string(f.coeffs()).unwrap();
        prop_assert_eq!(PolyQ::parse(&arr, q).unwrap(), f);
    }

    #[test]
    fn factor_inverts_multiply(q in prop::sample::select(vec![2u64, 3, 4, 5]), picks in prop::collection::vec((1usize..4, 0usize..64), 1..4)) {
        let f = fq(q);
        let mut product = PolyQ::one();
        let mut want: Vec<(PolyQ, u32)> = Vec::new();
        for (d, i) in picks {
            let list = enumerate_irreducibles(&f, d).unwrap();
            let g = list[i % list.len()].clone();
            product = product.mul(&g, &f);
            match want.iter_mut().find(|(h, _)| *h == g) {
                Some(e) => e.1 += 1,
                None => want.push((g, 1)),
            }
        }
        want.sort();
        let mut got = factor_poly(&f, &product).unwrap();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn cyclotomic_json_round_trip(a in cyclotomic()) {
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back = CyclotomicJson::parse(&text).unwrap();
        prop_assert!(back.try_eq(&a).unwrap());
    }

    #[test]
    fn cyclotomic_ring_laws(a in cyclotomic(), b in cyclotomic(), c in cyclotomic()) {
        prop_assert!(a.add(&b).sub(&b).try_eq(&a).unwrap());
        prop_assert!(a.mul(&b).try_eq(&b.mul(&a)).unwrap());
        prop_assert!(a.mul(&b.add(&c)).try_eq(&a.mul(&b).add(&a.mul(&c))).unwrap());
        prop_assert!(a.conj().conj().try_eq(&a).unwrap());
        prop_assert!(a.mul(&b).conj().try_eq(&a.conj().mul(&b.conj())).unwrap());
    }

    #[test]
    fn compress_preserves_value(a in cyclotomic()) {
        prop_assert!(a.compress().try_eq(&a).unwrap());
        prop_assert!(a.lift(a.modulus() * 3).try_eq(&a).unwrap());
    }

    #[test]
    fn stanley_forms_agree(n in 1u32..7, k in 1u32..4, pick in 0usize..20) {
        let ps = partitions(n);
        let mu = &ps[pick % ps.len()];
        prop_assert_eq!(stanley_count(n, k, mu).unwrap(), stanley_count_explicit(n, k, mu).unwrap());
    }
}

#[test]
fn irreducible_counts_match_enumeration() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for d in 1..=4usize {
            if q.pow(d as u32) > 1 << 14 {
                continue;
            }
            let listed = enumerate_irreducibles(&fq(q), d).unwrap().len();
            // both sides omit z
            assert_eq!(BigInt::from(listed), count_irreducibles(q, d as u64), "q={q} d={d}");
        }
    }
}

#[test]
fn class_index_json_round_trip() {
    for (q, n) in [(2u64, 3usize), (3, 3), (4, 2)] {
        for idx in enumerate_class_indices(&fq(q), n).unwrap() {
            let text = idx.to_json_value().to_string();
            assert_eq!(ClassIndex::parse_json(&text, q).unwrap(), idx);
        }
    }
}

#[test]
fn n2_counts_are_conserved() {
    // Σ_μ g_{k,μ}(q) = #CT_(2)(q)^k
    for q in [2u64, 3, 4, 5] {
        let g = Arc::new(GreenCtx::new(Arc::new(FieldCtx::new(q, 2).unwrap())));
        let counter = Counter::with_green(g);
        for k in 1..=4u32 {
            let a = closed_nu_n(q, 2, k).unwrap().value;
            let b = counter.frobenius_count(k, &Partition::new(vec![1, 1]), false).unwrap().value;
            assert_eq!(a + b, num_traits::pow(ct_n_size(q, 2), k as usize), "q={q} k={k}");
        }
    }
}

#[test]
fn auto_rejects_non_prime_power() {
    assert!(count_auto(6, 2, &Partition::new(vec![2]), false).is_err());
}
