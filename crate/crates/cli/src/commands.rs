use std::sync::Arc;

use glnq_core::arith;
use glnq_core::counting::{
    closed_n_minus_1, closed_nu_n, closed_re_main, count_auto, ct_n_size, limit_report, quasipoly_fit, rat_to_f64,
    CountResult, Counter, Method, Verdict,
};
use glnq_core::cyclotomic::rat_string;
use glnq_core::field_tower::{FieldCtx, FieldElem, Fq, PrimePower};
use glnq_core::green_chars::{char_degree, GreenCtx};
use glnq_core::matrix_group::{
    class_index, class_size, enumerate_class_indices, gamma_n, is_regular_elliptic, MatrixQ,
};
use glnq_core::oracle::{brute_g, build_class_algebra};
use glnq_core::poly_irr::{enumerate_irreducibles, PolyQ};
use glnq_core::Error;
use num_bigint::BigInt;
use serde_json::json;

use crate::output::{csv, json as to_json, text_table};
use crate::{CliError, Format, Order, RunConfig};

type Out = Result<String, CliError>;

fn s<T: ToString>(v: T) -> String {
    v.to_string()
}

fn green(cfg: &RunConfig, field: FieldCtx) -> Arc<GreenCtx> {
    Arc::new(GreenCtx::with_budget(Arc::new(field), cfg.budget))
}

pub fn chartable(cfg: &RunConfig, pin: Option<&str>) -> Out {
    let (q, n) = (cfg.q()?, cfg.n()?);
    let field = match pin {
        Some(text) => FieldCtx::pinned(q, n, &PolyQ::parse(text, q)?)?,
        None => FieldCtx::new(q, n)?,
    };
    let g = green(cfg, field);
    let table = g.character_table()?;
    let (orthogonal, failure) = match table.verify_orthogonality() {
        Ok(r) => (r.passed, None),
        Err(Error::OrthogonalityFailure(a, b)) => (false, Some(format!("{a} vs {b}"))),
        Err(e) => return Err(e.into()),
    };
    let reps = g.group(n as usize)?.reps.clone();
    let text = match cfg.format {
        Format::Json => {
            let mut v = table.to_json();
            v["representatives"] = json!(reps.iter().map(|r| r.rows()).collect::<Vec<_>>());
            v["generator_power"] = json!(g.field.generator_power);
            v["orthogonality"] = json!({ "passed": orthogonal, "failure": failure });
            to_json(&v)
        }
        Format::Csv => table.to_csv(),
        Format::Pretty => {
            let mut headers = vec![s("χ \\ class")];
            headers.extend(table.classes.iter().map(s));
            let rows: Vec<Vec<String>> = table
                .characters
                .iter()
                .zip(&table.values)
                .map(|(c, row)| {
                    let mut r = vec![s(c)];
                    r.extend(row.iter().map(|v| s(v.display_form().unwrap_or_else(|_| v.clone()))));
                    r
                })
                .collect();
            let mut out = text_table(&headers, &rows);
            out.push_str(&format!("orthogonality: {}\n", if orthogonal { "passed" } else { "FAILED" }));
            out
        }
    };
    match failure {
        None => Ok(text),
        Some(f) => Err(CliError::Mismatch(format!("{text}\northogonality failure: {f}"))),
    }
}

fn count_result(cfg: &RunConfig) -> Result<CountResult, CliError> {
    let (q, k, mu) = (cfg.q()?, cfg.k()?, cfg.mu()?);
    let n = mu.size();
    if let Some(cfg_n) = cfg.n {
        if cfg_n != n {
            return Err(CliError::Usage(format!("--mu {mu} is not a partition of --n {cfg_n}")));
        }
    }
    let res = match cfg.method {
        None => count_auto(q, k, &mu, cfg.box_count)?,
        Some(Method::ClosedNuN) => {
            if mu.parts() != [n] {
                return Err(CliError::Usage(format!("closed-nu-n needs μ = ({n}), got {mu}")));
            }
            closed_nu_n(q, n, k)?
        }
        Some(Method::ClosedNMinus1) => {
            if n < 3 || mu.parts() != [n - 1, 1] {
                return Err(CliError::Usage(format!("closed-n-minus-1 needs μ = (n-1,1) with n > 2, got {mu}")));
            }
            closed_n_minus_1(q, n, k)?
        }
        Some(Method::ClosedReMain) => closed_re_main(q, n, k, &mu)?,
        Some(Method::Frobenius) => {
            Counter::with_green(green(cfg, FieldCtx::new(q, n)?)).frobenius_count(k, &mu, cfg.box_count)?
        }
        Some(Method::Brute) => {
            let alg = build_class_algebra(&green(cfg, FieldCtx::new(q, n)?))?;
            let value = brute_g(&alg, k, &mu, cfg.box_count)?;
            CountResult { n, k, mu: mu.clone(), q, value, method: Method::Brute, box_count: cfg.box_count }
        }
    };
    Ok(res)
}

pub fn count(cfg: &RunConfig) -> Out {
    let res = count_result(cfg)?;
    Ok(match cfg.format {
        Format::Json => to_json(&serde_json::to_value(&res).expect("serializable")),
        Format::Csv => csv(
            &["n", "k", "mu", "q", "box", "method", "value"].map(s),
            &[vec![s(res.n), s(res.k), s(&res.mu), s(res.q), s(res.box_count), method_name(res.method), s(&res.value)]],
        ),
        Format::Pretty => format!(
            "g{}_{{{},{}}}({}) = {}  [{}]\n",
            if res.box_count { "□" } else { "" },
            res.k,
            res.mu,
            res.q,
            res.value,
            method_name(res.method)
        ),
    })
}

fn method_name(m: Method) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn sweep(cfg: &RunConfig, qmin: u64, qmax: u64, qs: Option<Vec<u64>>) -> Out {
    let (k, mu) = (cfg.k()?, cfg.mu()?);
    let q_list = match qs {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&q| arith::prime_power_parts(q).is_none()) {
                return Err(Error::NotPrimePower(bad).into());
            }
            list
        }
        None => arith::prime_powers_upto(qmax).into_iter().filter(|&q| q >= qmin).collect(),
    };
    if q_list.is_empty() {
        return Err(CliError::Usage("no prime powers in the requested range".into()));
    }
    let mut warnings = Vec::new();
    if k < 2 {
        let w = "the limit 1/z_μ is only established for k ≥ 2; k = 1 values are reported without that guarantee";
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let rows = limit_report(k, &mu, &q_list)?;
    let headers = ["q", "p", "target", "abs_diff", "abs_diff_approx", "box", "method"].map(s);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                s(r.q),
                rat_string(&r.p),
                rat_string(&r.target),
                rat_string(&r.abs_diff),
                format!("{:.6e}", r.abs_diff_approx),
                s(r.box_count),
                method_name(r.method),
            ]
        })
        .collect();
    Ok(match cfg.format {
        Format::Json => to_json(&json!({ "n": mu.size(), "k": k, "mu": mu, "rows": rows, "warnings": warnings })),
        Format::Csv => csv(&headers, &cells),
        Format::Pretty => {
            let mut short = cells.clone();
            for (row, r) in short.iter_mut().zip(&rows) {
                row[1] = format!("{:.6}", rat_to_f64(&r.p));
            }
            text_table(&headers, &short)
        }
    })
}

pub fn quasipoly(cfg: &RunConfig, residue: u64, samples: Option<Vec<u64>>, bound: Option<usize>) -> Out {
    let (n, k) = (cfg.n()?, cfg.k()?);
    let report = quasipoly_fit(n, k, residue, samples, bound)?;
    Ok(match cfg.format {
        Format::Json => to_json(&serde_json::to_value(&report).expect("serializable")),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                report.coefficients.coefficient_strings().into_iter().enumerate().map(|(i, c)| vec![s(i), c]).collect();
            csv(&["power", "coefficient"].map(s), &rows)
        }
        Format::Pretty => {
            let verdict = match report.verdict {
                Verdict::Polynomial => s("polynomial"),
                Verdict::NonPolynomial => format!("non-polynomial (witness q = {})", report.witness.unwrap_or(0)),
            };
            let terms: Vec<String> = report
                .coefficients
                .coefficient_strings()
                .into_iter()
                .enumerate()
                .filter(|(_, c)| c != "0")
                .map(|(i, c)| format!("({c})·q^{i}"))
                .collect();
            format!(
                "g_{{{k},({n})}}(q) for q ≡ {} mod {n}: {verdict}\nsamples: {:?}\n{}\n",
                report.residue,
                report.samples,
                if terms.is_empty() { s("0") } else { terms.join(" + ") }
            )
        }
    })
}

pub fn irreducibles(cfg: &RunConfig, d: u32, order: Order) -> Out {
    let q = cfg.q()?;
    let n = cfg.n.unwrap_or(d);
    if d == 0 || d > n {
        return Err(CliError::Usage(format!("need 1 ≤ d ≤ n, got d = {d}, n = {n}")));
    }
    let field = FieldCtx::new(q, n)?;
    let polys = enumerate_irreducibles(&field.fq, d as usize)?;
    let mut rows = Vec::with_capacity(polys.len());
    for f in polys.iter() {
        let ell = field.ell_of(f)?;
        let root = FieldElem::Unit(field.subfield_power(d as u64, ell));
        let theta_n = if n % d == 0 { Some(field.theta_n(root)?) } else { None };
        rows.push((f.clone(), ell, theta_n));
    }
    if order == Order::Ell {
        rows.sort_by_key(|r| r.1);
    }
    let headers = ["poly", "coeffs", "ell", "theta_n"].map(s);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(f, ell, t)| {
            vec![s(f), format!("{:?}", f.coeffs()), s(ell), t.map(s).unwrap_or_else(|| s("-"))]
        })
        .collect();
    Ok(match cfg.format {
        Format::Json => to_json(&json!({
            "q": q,
            "n": n,
            "d": d,
            "count": rows.len(),
            "polynomials": rows.iter().map(|(f, ell, t)| json!({
                "poly": f.to_text(),
                "coeffs": f.coeffs(),
                "ell": ell,
                "theta_n": t,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&headers, &cells),
        Format::Pretty => text_table(&headers, &cells),
    })
}

fn parse_matrix(text: &str, q: u64) -> Result<MatrixQ, CliError> {
    let rows: Vec<Vec<u32>> = text
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<u64>() {
                    Ok(v) if v < q => Ok(v as u32),
                    _ => Err(CliError::Usage(format!("bad matrix entry {t:?} for q = {q}"))),
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(MatrixQ::from_rows(&rows)?)
}

pub fn classinfo(cfg: &RunConfig, matrix: Option<&str>) -> Out {
    let q = cfg.q()?;
    let fq = Fq::new(PrimePower::new(q)?)?;
    if let Some(text) = matrix {
        let g = parse_matrix(text, q)?;
        if !g.is_invertible(&fq) {
            return Err(Error::Singular.into());
        }
        let n = g.n();
        let idx = class_index(&g, &fq)?;
        let size = class_size(q, &idx, n)?;
        let centralizer = gamma_n(q, n as u64) / &size;
        let elliptic = is_regular_elliptic(&g, &fq)?;
        let v = json!({
            "q": q,
            "n": n,
            "index": idx.to_json_value(),
            "label": s(&idx),
            "cycle_type": idx.cycle_type(),
            "regular_semisimple": idx.is_regular_semisimple(),
            "regular_elliptic": elliptic,
            "class_size": s(&size),
            "centralizer_order": s(&centralizer),
        });
        return Ok(match cfg.format {
            Format::Json => to_json(&v),
            Format::Csv | Format::Pretty => {
                let headers = ["index", "cycle_type", "rss", "elliptic", "class_size", "centralizer"].map(s);
                let row = vec![vec![
                    s(&idx),
                    s(idx.cycle_type()),
                    s(idx.is_regular_semisimple()),
                    s(elliptic),
                    s(&size),
                    s(&centralizer),
                ]];
                if cfg.format == Format::Csv { csv(&headers, &row) } else { text_table(&headers, &row) }
            }
        });
    }
    let n = cfg.n()? as usize;
    let classes = enumerate_class_indices(&fq, n)?;
    let mut rows = Vec::with_capacity(classes.len());
    let mut total = BigInt::from(0);
    for idx in &classes {
        let size = class_size(q, idx, n)?;
        total += &size;
        let elliptic = idx.as_primary().is_some_and(|(f, lam)| f.degree() == n && lam.parts() == [1]);
        rows.push((idx, size, elliptic, char_degree(q, idx, n)?));
    }
    let gamma = gamma_n(q, n as u64);
    if total != gamma {
        return Err(CliError::Mismatch(format!("class sizes sum to {total}, group order is {gamma}")));
    }
    let headers = ["index", "cycle_type", "rss", "elliptic", "class_size", "char_degree"].map(s);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(idx, size, ell, deg)| {
            vec![s(idx), s(idx.cycle_type()), s(idx.is_regular_semisimple()), s(ell), s(size), s(deg)]
        })
        .collect();
    Ok(match cfg.format {
        Format::Json => to_json(&json!({
            "q": q,
            "n": n,
            "group_order": s(&gamma),
            "class_count": rows.len(),
            "ct_n_size": s(ct_n_size(q, n as u64)),
            "classes": rows.iter().map(|(idx, size, ell, deg)| json!({
                "index": idx.to_json_value(),
                "label": s(idx),
                "cycle_type": idx.cycle_type(),
                "regular_semisimple": idx.is_regular_semisimple(),
                "regular_elliptic": ell,
                "class_size": s(size),
                "char_degree": s(deg),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&headers, &cells),
        Format::Pretty => text_table(&headers, &cells),
    })
}
