use ehrhart_dp::ehrhart::dstar_sform;
use ehrhart_dp::lp::build_k2_certificate;
use ehrhart_dp::mechanism::{
    build_cascade_mechanism, build_k2_mechanism, expected_distortion, TruncationSpec,
};
use ehrhart_dp::Scalar;
use num_rational::BigRational;

use crate::config::{emit, limits, CliError, CliResult, Common, ModeArg};

/// Largest n for the K = 2 path.
const K2_MAX_N: u64 = 200;

fn run_as<S: Scalar>(c: &Common, ns: &[u64]) -> CliResult<()> {
    let limits = limits()?;
    let theta: S = c.theta()?;
    let limit = dstar_sform(c.k, &theta)?;
    let mut csv = String::from("n,mechanism_distortion,certificate_objective,limit,gap\n");
    let mut gaps = Vec::new();
    for &n in ns {
        let prior = c.prior::<S>(n)?;
        let (distortion, certificate) = if c.k == 2 {
            let (table, _) = build_k2_mechanism(theta.clone(), &prior, &limits)?;
            let (cert, _) = build_k2_certificate(&theta, &prior)?;
            (expected_distortion(&table, &prior)?, Some(cert.objective()))
        } else {
            let trunc = TruncationSpec::default_ball(&prior, c.radius_const)?;
            let table = build_cascade_mechanism(n, c.k, theta.clone(), &trunc, &limits)?;
            (expected_distortion(&table, &prior)?, None)
        };
        let gap = (distortion.clone() - limit.clone()).abs();
        csv += &format!(
            "{n},{},{},{},{}\n",
            distortion.render(),
            certificate.map(|v| v.render()).unwrap_or_default(),
            limit.render(),
            gap.render()
        );
        gaps.push((n, gap.to_f64_lossy()));
    }
    emit(c.out.as_deref(), &csv)?;
    for w in gaps.windows(2) {
        if w[1].1 >= w[0].1 {
            eprintln!(
                "note: gap does not shrink from n={} to n={}",
                w[0].0, w[1].0
            );
        }
    }
    Ok(())
}

pub fn run(c: &Common, ns: &[u64]) -> CliResult<()> {
    c.check_k()?;
    let ns: Vec<u64> = match (ns.is_empty(), c.k) {
        (false, _) => ns.to_vec(),
        (true, 2) => vec![10, 20, 40, 80],
        (true, _) => vec![12, 24, 48],
    };
    if c.k == 2 {
        if let Some(n) = ns.iter().find(|&&n| n > K2_MAX_N) {
            return Err(CliError::Usage(format!(
                "K = 2 sweep stops at n = {K2_MAX_N}, got {n}"
            )));
        }
    }
    if ns.contains(&0) {
        return Err(CliError::Usage("--ns entries must be positive".into()));
    }
    match c.mode {
        ModeArg::Float => run_as::<f64>(c, &ns),
        ModeArg::Rational => run_as::<BigRational>(c, &ns),
    }
}
