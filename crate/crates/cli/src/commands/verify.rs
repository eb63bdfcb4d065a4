use ehrhart_dp::ehrhart::{
    dilate_count, dstar_limit, e_pf, e_pf_closed, face_count_bruteforce, face_count_closed,
    fit_ehrhart_polynomial, legendre, s_polynomial, DStarForm, EvalMode, FaceCountVariant,
};
use ehrhart_dp::mechanism::{geometric_distortion_closed, geometric_distortion_series};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::config::{emit, limits, pretty, CliError, CliResult, Common};

const THETAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Serialize)]
struct Check {
    identity: &'static str,
    passed: bool,
    compared: usize,
    detail: String,
}

impl Check {
    fn new(identity: &'static str, compared: usize, failures: Vec<String>) -> Self {
        Check {
            identity,
            passed: failures.is_empty(),
            compared,
            detail: failures.into_iter().next().unwrap_or_default(),
        }
    }
}

fn face_counts(poison: bool) -> CliResult<Check> {
    let limits = limits()?;
    let mut failures = Vec::new();
    let mut compared = 0;
    for k in 2..=5 {
        for d in 1..=8 {
            let mut brute = BigUint::from(face_count_bruteforce(k, d, &limits)?);
            if poison && (k, d) == (3, 2) {
                brute += 1u32;
            }
            for v in FaceCountVariant::ALL {
                compared += 1;
                let closed = face_count_closed(k, d, v)?;
                if closed != brute {
                    failures.push(format!(
                        "K={k} d={d}: {} gives {closed}, enumeration {brute}",
                        v.name()
                    ));
                }
            }
        }
    }
    Ok(Check::new("face-counts", compared, failures))
}

fn polynomiality() -> CliResult<Check> {
    let mut failures = Vec::new();
    let mut compared = 0;
    for k in 2..=5usize {
        let poly = fit_ehrhart_polynomial(k)?;
        for d in k as u64..=k as u64 + 5 {
            compared += 1;
            let want = BigRational::from_integer(dilate_count(k, d)?.into());
            let got = poly.eval_int(d as i64);
            if got != want {
                failures.push(format!("K={k} d={d}: polynomial {got}, count {want}"));
            }
        }
    }
    Ok(Check::new("ehrhart-polynomial", compared, failures))
}

fn grid_check<F>(identity: &'static str, tol: f64, mut f: F) -> CliResult<Check>
where
    F: FnMut(usize, f64) -> CliResult<f64>,
{
    let mut failures = Vec::new();
    let mut compared = 0;
    for k in 2..=6 {
        for theta in THETAS {
            compared += 1;
            let err = f(k, theta)?;
            if !(err <= tol) {
                failures.push(format!(
                    "K={k} theta={theta}: deviation {err:.3e} above {tol:.0e}"
                ));
            }
        }
    }
    Ok(Check::new(identity, compared, failures))
}

pub fn run(c: &Common, poison: bool) -> CliResult<()> {
    let checks = vec![
        face_counts(poison)?,
        polynomiality()?,
        grid_check("legendre-identity", 1e-10, |k, t| {
            let (s, _) = s_polynomial(k, &t)?;
            let m = k as u64 - 1;
            let y = (1.0 + t) / (1.0 - t);
            Ok((s - (1.0 - t).powi(m as i32) * legendre(m, &y)).abs())
        })?,
        grid_check("form-agreement", 1e-9, |k, t| {
            let v: Vec<f64> = DStarForm::ALL
                .iter()
                .map(|&f| dstar_limit(k, t, f, 1e-12))
                .collect::<Result<_, _>>()?;
            Ok(v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max))
        })?,
        grid_check("series-vs-closed", 1e-10, |k, t| {
            let series = geometric_distortion_series(k, t, 1e-15, 100_000)?;
            let closed = geometric_distortion_closed(k, &t)?;
            let e = e_pf(k, t, EvalMode::Series { tol: 1e-15 }, 100_000)?.value;
            let (e_closed, _) = e_pf_closed(k, &t)?;
            Ok(((series - closed) / closed)
                .abs()
                .max(((e - e_closed) / e_closed).abs()))
        })?,
    ];
    let first_failure = checks.iter().find(|ch| !ch.passed);
    let report = json!({
        "config": c.provenance("verify"),
        "poisoned": poison,
        "passed": first_failure.is_none(),
        "checks": checks,
    });
    emit(c.out.as_deref(), &pretty(&report))?;
    match first_failure {
        None => Ok(()),
        Some(ch) => Err(CliError::Verification(format!(
            "{}: {}",
            ch.identity, ch.detail
        ))),
    }
}
