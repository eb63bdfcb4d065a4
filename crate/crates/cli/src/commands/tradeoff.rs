use ehrhart_dp::ehrhart::{
    corollary_as_printed, dstar_ehrhart, dstar_legendre_corrected, dstar_sform,
};
use ehrhart_dp::numeric::format_sig;
use ehrhart_dp::Scalar;
use num_rational::BigRational;

use crate::config::{emit, CliResult, Common, ModeArg};

const HEADER: &str =
    "theta,dstar_ehrhart,dstar_sform,dstar_legendre_corrected,corollary_as_printed";

struct Row {
    theta: String,
    ehrhart: f64,
    sform: String,
    legendre: String,
    printed: String,
    spread: f64,
}

fn closed_forms<S: Scalar>(k: usize, theta: &S) -> CliResult<(S, S, S)> {
    Ok((
        dstar_sform(k, theta)?,
        dstar_legendre_corrected(k, theta)?,
        corollary_as_printed(k, theta)?,
    ))
}

fn row(c: &Common, theta_text: &str) -> CliResult<Row> {
    let probe = Common {
        theta: theta_text.to_string(),
        ..c.clone()
    };
    let theta = probe.theta_f64()?;
    let max_terms = crate::config::limits()?.series_terms;
    let ehrhart = dstar_ehrhart(c.k, theta, c.tol.min(1e-12), max_terms)?;
    let (sform, legendre, printed, spread) = match c.mode {
        ModeArg::Float => {
            let (s, l, p) = closed_forms(c.k, &theta)?;
            let spread = (s - ehrhart).abs().max((l - ehrhart).abs());
            (s.render(), l.render(), p.render(), spread)
        }
        ModeArg::Rational => {
            let t: BigRational = probe.theta()?;
            let (s, l, p) = closed_forms(c.k, &t)?;
            let spread = (s.to_f64_lossy() - ehrhart)
                .abs()
                .max((l.to_f64_lossy() - ehrhart).abs());
            (s.render(), l.render(), p.render(), spread)
        }
    };
    Ok(Row {
        theta: theta_text.to_string(),
        ehrhart,
        sform,
        legendre,
        printed,
        spread,
    })
}

pub fn run(c: &Common, thetas: &[String]) -> CliResult<()> {
    c.check_k()?;
    c.check_tol()?;
    let grid: Vec<&str> = if thetas.is_empty() {
        vec![c.theta.as_str()]
    } else {
        thetas.iter().map(String::as_str).collect()
    };
    let rows = grid
        .iter()
        .map(|t| row(c, t))
        .collect::<CliResult<Vec<_>>>()?;
    if c.out.is_some() || !thetas.is_empty() {
        let mut csv = format!("{HEADER}\n");
        for r in &rows {
            csv += &format!(
                "{},{},{},{},{}\n",
                r.theta,
                format_sig(r.ehrhart, 12),
                r.sform,
                r.legendre,
                r.printed
            );
        }
        emit(c.out.as_deref(), &csv)?;
    }
    if thetas.is_empty() {
        let r = &rows[0];
        println!("K={} theta={}", c.k, r.theta);
        println!("  ehrhart-series        {}", format_sig(r.ehrhart, 12));
        println!("  s-form                {}", r.sform);
        println!("  legendre-corrected    {}", r.legendre);
        println!(
            "  corollary-as-printed  {}  (sign variant, disagrees; reported only)",
            r.printed
        );
        println!("  max spread            {:.3e}", r.spread);
    }
    Ok(())
}
