use std::sync::Arc;

use glnq_core::counting::{closed_n_minus_1, closed_nu_n, closed_re_main, quasipoly_fit, re_main_applies, Counter, Verdict};
use glnq_core::field_tower::FieldCtx;
use glnq_core::green_chars::{char_degree, GreenCtx};
use glnq_core::matrix_group::{class_size, MatrixQ};
use glnq_core::oracle::{brute_g, build_class_algebra, gl3f2_reference, verify_character_table, CrossCheck};
use glnq_core::partitions_sym::partitions;
use glnq_core::poly_irr::PolyQ;
use serde_json::json;

use crate::output::{json as to_json, text_table};
use crate::{CliError, Format, RunConfig};

const TINY: [(u64, u32); 3] = [(2, 2), (3, 2), (2, 3)];

fn err_text(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn tiny_groups(checks: &mut Vec<CrossCheck>) -> Result<(), CliError> {
    for (q, n) in TINY {
        let field = if (q, n) == (2, 3) {
            FieldCtx::pinned(q, n, &PolyQ::from_coeffs(vec![1, 0, 1, 1]))?
        } else {
            FieldCtx::new(q, n)?
        };
        let g = Arc::new(GreenCtx::new(Arc::new(field)));
        let table = g.character_table()?;
        let reference = ((q, n) == (2, 3)).then(gl3f2_reference);
        let report = verify_character_table(&g, &table, reference.as_ref())?;
        let found = if report.passed() {
            "ok".to_string()
        } else {
            serde_json::to_string(&report).unwrap_or_default()
        };
        checks.push(CrossCheck::new(
            "character_table",
            if reference.is_some() { "orthogonality+reference" } else { "orthogonality" },
            json!({"q": q, "n": n}),
            found,
            "ok",
        ));

        let data = g.group(n as usize)?;
        let id = data.class_of[&MatrixQ::identity(n as usize)];
        for (c, idx) in data.classes.iter().enumerate() {
            let sz = class_size(q, idx, n as usize)?;
            checks.push(CrossCheck::new(
                "class_size",
                "enumeration",
                json!({"q": q, "n": n, "class": idx.to_string()}),
                &sz,
                &data.sizes[c],
            ));
            let deg = char_degree(q, idx, n as usize)?;
            let at_id = table.values[table.characters.iter().position(|x| x == idx).expect("row")][id]
                .to_integer()
                .map_err(CliError::from)?
                .map(|v| v.to_string())
                .unwrap_or_else(|| "non-integer".into());
            checks.push(CrossCheck::new(
                "char_degree",
                "chi_at_identity",
                json!({"q": q, "n": n, "character": idx.to_string()}),
                &deg,
                at_id,
            ));
        }

        let alg = build_class_algebra(&g)?;
        let counter = Counter::with_green(g.clone());
        for k in [2u32, 3] {
            for mu in partitions(n) {
                let inputs = json!({"q": q, "n": n, "k": k, "mu": mu.to_string()});
                let brute = brute_g(&alg, k, &mu, false)?;
                let frob = counter.frobenius_count(k, &mu, false).map(|r| r.value.to_string()).unwrap_or_else(err_text);
                checks.push(CrossCheck::new("brute", "frobenius", inputs.clone(), &brute, frob));
                if mu.parts() == [n] {
                    let closed = closed_nu_n(q, n, k).map(|r| r.value.to_string()).unwrap_or_else(err_text);
                    checks.push(CrossCheck::new("brute", "closed_nu_n", inputs.clone(), &brute, closed));
                }
                if re_main_applies(&mu) {
                    let bb = brute_g(&alg, k, &mu, true)?;
                    let rm = closed_re_main(q, n, k, &mu).map(|r| r.value.to_string()).unwrap_or_else(err_text);
                    checks.push(CrossCheck::new("brute_box", "closed_re_main", inputs.clone(), &bb, rm));
                    if mu.parts() == [n - 1, 1] {
                        let nm = closed_n_minus_1(q, n, k).map(|r| r.value.to_string()).unwrap_or_else(err_text);
                        checks.push(CrossCheck::new("brute_box", "closed_n_minus_1", inputs, &bb, nm));
                    }
                }
            }
        }
    }
    Ok(())
}

fn fit_check(checks: &mut Vec<CrossCheck>, n: u32, k: u32, residue: u64, want: Verdict) {
    let inputs = json!({"n": n, "k": k, "residue": residue});
    let found = match quasipoly_fit(n, k, residue, None, None) {
        Ok(r) => match r.verdict {
            Verdict::Polynomial => "polynomial".to_string(),
            Verdict::NonPolynomial => format!("non_polynomial (witness q = {})", r.witness.unwrap_or(0)),
        },
        Err(e) => err_text(e),
    };
    let expect = match want {
        Verdict::Polynomial => "polynomial",
        Verdict::NonPolynomial => "non_polynomial",
    };
    let mut check = CrossCheck::new("quasipoly_fit", "expected_verdict", inputs, &found, expect);
    check.equal = found.starts_with(expect);
    checks.push(check);
}

pub fn run(cfg: &RunConfig, suite: &str, residue: Option<u64>) -> Result<String, CliError> {
    let mut checks = Vec::new();
    let qp = |checks: &mut Vec<CrossCheck>| {
        let (n, k) = (cfg.n.unwrap_or(3), cfg.k.unwrap_or(2));
        match residue {
            Some(r) => fit_check(checks, n, k, r, Verdict::Polynomial),
            None => (0..n as u64).for_each(|r| fit_check(checks, n, k, r, Verdict::Polynomial)),
        }
    };
    let np = |checks: &mut Vec<CrossCheck>| {
        fit_check(checks, cfg.n.unwrap_or(4), cfg.k.unwrap_or(2), residue.unwrap_or(2), Verdict::NonPolynomial)
    };
    match suite {
        "tiny-groups" => tiny_groups(&mut checks)?,
        "quasipoly" => qp(&mut checks),
        "nonpoly" => np(&mut checks),
        "all" => {
            tiny_groups(&mut checks)?;
            qp(&mut checks);
            np(&mut checks);
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite {other:?}; expected tiny-groups, quasipoly, nonpoly, or all"
            )))
        }
    }
    let failed: Vec<&CrossCheck> = checks.iter().filter(|c| !c.equal).collect();
    let passed = failed.is_empty();
    let text = match cfg.format {
        Format::Json => to_json(&json!({
            "suite": suite,
            "passed": passed,
            "total": checks.len(),
            "failed": failed.len(),
            "witness": failed.first(),
            "checks": checks,
        })),
        Format::Csv | Format::Pretty => {
            let headers = ["method_a", "method_b", "inputs", "value_a", "value_b", "equal"].map(String::from);
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.method_a.clone(),
                        c.method_b.clone(),
                        c.inputs.to_string(),
                        c.value_a.clone(),
                        c.value_b.clone(),
                        c.equal.to_string(),
                    ]
                })
                .collect();
            if cfg.format == Format::Csv {
                crate::output::csv(&headers, &rows)
            } else {
                let shown: Vec<Vec<String>> = if passed {
                    Vec::new()
                } else {
                    rows.into_iter().filter(|r| r[5] == "false").collect()
                };
                let mut out = format!("{suite}: {} checks, {} failed\n", checks.len(), failed.len());
                if !shown.is_empty() {
                    out.push_str(&text_table(&headers, &shown));
                }
                out
            }
        }
    };
    if passed {
        Ok(text)
    } else {
        Err(CliError::Mismatch(text))
    }
}
