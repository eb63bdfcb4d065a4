use ehrhart_dp::histogram::MultinomialPrior;
use ehrhart_dp::lp::{
    build_dual_lp, build_generalk_certificate, build_k2_certificate, build_primal_lp,
    export_lp_text, solve_simplex, verify_certificate, GeneralKReading, SolveReport, Status,
    VerificationReport,
};
use ehrhart_dp::mechanism::{build_cascade_mechanism, build_k2_mechanism, TruncationSpec};
use ehrhart_dp::{Limits, Scalar};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::config::{emit, limits, pretty, CliError, CliResult, Common, ModeArg};

fn tol<S: Scalar>(c: &Common) -> S {
    match S::MODE {
        ehrhart_dp::Mode::Rational => S::zero(),
        ehrhart_dp::Mode::Float => S::from_f64(c.tol).expect("finite tolerance"),
    }
}

fn solve_json<S: Scalar>(r: &SolveReport<S>) -> Value {
    json!({
        "status": r.status,
        "objective": r.objective.as_ref().map(Scalar::to_json),
        "pivots": r.pivots,
    })
}

fn solve_pair<S: Scalar>(
    c: &Common,
    prior: &MultinomialPrior<S>,
    limits: &Limits,
) -> CliResult<(SolveReport<S>, SolveReport<S>)> {
    let theta: S = c.theta()?;
    let primal = build_primal_lp(c.n, c.k, &theta, prior, limits)?;
    let dual = build_dual_lp(c.n, c.k, &theta, prior, limits)?;
    Ok((solve_simplex(&primal), solve_simplex(&dual)))
}

fn solve_as<S: Scalar>(c: &Common) -> CliResult<()> {
    let limits = limits()?;
    let prior = c.prior::<S>(c.n)?;
    let (rp, rd) = solve_pair(c, &prior, &limits)?;
    let gap = match (&rp.objective, &rd.objective) {
        (Some(p), Some(d)) => Some(p.clone() - d.clone()),
        _ => None,
    };
    let ok = rp.status == Status::Optimal
        && rd.status == Status::Optimal
        && gap.as_ref().is_some_and(|g| g.abs() <= tol::<S>(c));
    let report = json!({
        "config": c.provenance("lp solve"),
        "primal": solve_json(&rp),
        "dual": solve_json(&rd),
        "gap": gap.as_ref().map(Scalar::to_json),
        "strong_duality": ok,
    });
    emit(c.out.as_deref(), &pretty(&report))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "primal {:?}, dual {:?}, gap {}",
            rp.status,
            rd.status,
            gap.map_or("undefined".into(), |g| g.render())
        )))
    }
}

fn report_json<S: Scalar>(r: &VerificationReport<S>, tol: &S) -> Value {
    let mut v = r.to_json();
    v["optimal_pair"] = Value::from(r.is_optimal_pair(tol));
    v
}

/// The solver optimum for comparison, when the program fits the caps.
fn lp_reference<S: Scalar>(c: &Common, prior: &MultinomialPrior<S>, limits: &Limits) -> Value {
    match solve_pair(c, prior, limits) {
        Ok((rp, rd)) => json!({ "primal": solve_json(&rp), "dual": solve_json(&rd) }),
        Err(e) => json!({ "skipped": e.to_string() }),
    }
}

fn certify_as<S: Scalar>(c: &Common) -> CliResult<()> {
    let limits = limits()?;
    let prior = c.prior::<S>(c.n)?;
    let theta: S = c.theta()?;
    let tol = tol::<S>(c);
    let (reports, ok) = if c.k == 2 {
        let (table, anchors) = build_k2_mechanism(theta.clone(), &prior, &limits)?;
        let (cert, _) = build_k2_certificate(&theta, &prior)?;
        let r = verify_certificate(&table, &cert, &prior, &tol)?;
        let ok = r.is_optimal_pair(&tol);
        let mut v = report_json(&r, &tol);
        v["mechanism"] = Value::from("k2-fold");
        v["left_anchor"] = Value::from(anchors.left_anchor);
        v["right_anchor"] = Value::from(anchors.right_anchor);
        v["notes"] = json!(cert.notes);
        (vec![v], ok)
    } else {
        let trunc = TruncationSpec::default_ball(&prior, c.radius_const)?;
        let table = build_cascade_mechanism(c.n, c.k, theta.clone(), &trunc, &limits)?;
        let mut out = Vec::new();
        let mut ok = false;
        for reading in [GeneralKReading::Printed, GeneralKReading::Halfspace] {
            let cert = build_generalk_certificate(c.n, c.k, &theta, &prior, reading, &limits)?;
            let r = verify_certificate(&table, &cert, &prior, &tol)?;
            ok |= r.is_optimal_pair(&tol);
            let mut v = report_json(&r, &tol);
            v["mechanism"] = Value::from("ball-cascade");
            v["reading"] = json!(reading);
            v["notes"] = json!(cert.notes);
            out.push(v);
        }
        (out, ok)
    };
    let report = json!({
        "config": c.provenance("lp certify"),
        "certificates": reports,
        "lp_reference": lp_reference(c, &prior, &limits),
    });
    emit(c.out.as_deref(), &pretty(&report))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification(
            "the certificate and mechanism are not an optimal pair (see the report)".into(),
        ))
    }
}

fn export_as<S: Scalar>(c: &Common, dual: bool) -> CliResult<()> {
    let limits = limits()?;
    let prior = c.prior::<S>(c.n)?;
    let theta: S = c.theta()?;
    let lp = if dual {
        build_dual_lp(c.n, c.k, &theta, &prior, &limits)?
    } else {
        build_primal_lp(c.n, c.k, &theta, &prior, &limits)?
    };
    emit(c.out.as_deref(), &export_lp_text(&lp))
}

pub fn solve(c: &Common) -> CliResult<()> {
    match c.mode {
        ModeArg::Float => solve_as::<f64>(c),
        ModeArg::Rational => solve_as::<BigRational>(c),
    }
}

pub fn certify(c: &Common) -> CliResult<()> {
    match c.mode {
        ModeArg::Float => certify_as::<f64>(c),
        ModeArg::Rational => certify_as::<BigRational>(c),
    }
}

pub fn export(c: &Common, dual: bool) -> CliResult<()> {
    match c.mode {
        ModeArg::Float => export_as::<f64>(c, dual),
        ModeArg::Rational => export_as::<BigRational>(c, dual),
    }
}
