//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string so the page needs no glue beyond `JSON.parse`.

use ehrhart_dp::ehrhart::{
    corollary_as_printed, dstar_ehrhart, dstar_legendre_corrected, dstar_sform, DistanceLaw,
};
use ehrhart_dp::histogram::MultinomialPrior;
use ehrhart_dp::lp::{build_k2_certificate, build_primal_lp, solve_simplex};
use ehrhart_dp::mechanism::{build_k2_mechanism, dp_check, expected_distortion};
use ehrhart_dp::Limits;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` for which the mechanism view also solves the LP.
const LP_MAX_N: u64 = 12;
const MAX_DRAWS: u32 = 1_000_000;

fn wrap(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

fn check_theta(theta: f64) -> Result<(), String> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(format!("θ must lie in (0, 1), got {theta}"))
    }
}

/// The limiting distortion for `K` over `steps` evenly spaced θ in (0, 1).
pub fn tradeoff_curve_json(k: usize, steps: u32) -> Result<Value, String> {
    if !(2..=12).contains(&k) || !(2..=400).contains(&steps) {
        return Err(format!(
            "need 2 <= K <= 12 and 2 <= steps <= 400, got K={k}, steps={steps}"
        ));
    }
    let points = (1..steps)
        .map(|i| {
            let t = f64::from(i) / f64::from(steps);
            let e = |r: ehrhart_dp::Result<f64>| r.map_err(|e| e.to_string());
            Ok(json!({
                "theta": t,
                "sform": e(dstar_sform(k, &t))?,
                "legendre": e(dstar_legendre_corrected(k, &t))?,
                "ehrhart": e(dstar_ehrhart(k, t, 1e-12, 1_000_000))?,
                "printed": e(corollary_as_printed(k, &t))?,
            }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({ "k": k, "points": points }))
}

/// The folded two-cell mechanism with its anchors, distortion, privacy
/// check, certificate objective and, for small `n`, the LP optimum.
pub fn k2_mechanism_json(n: u32, theta: f64, p: f64) -> Result<Value, String> {
    check_theta(theta)?;
    if !(1..=200).contains(&n) || !(p > 0.0 && p < 1.0) {
        return Err(format!(
            "need 1 <= n <= 200 and p in (0, 1), got n={n}, p={p}"
        ));
    }
    let n = u64::from(n);
    let limits = Limits::default();
    let prior = MultinomialPrior::binary(p, n).map_err(|e| e.to_string())?;
    let (table, anchors) = build_k2_mechanism(theta, &prior, &limits).map_err(|e| e.to_string())?;
    let distortion = expected_distortion(&table, &prior).map_err(|e| e.to_string())?;
    let (cert, _) = build_k2_certificate(&theta, &prior).map_err(|e| e.to_string())?;
    let lp = if n <= LP_MAX_N {
        let lp = build_primal_lp(n, 2, &theta, &prior, &limits).map_err(|e| e.to_string())?;
        solve_simplex(&lp).objective
    } else {
        None
    };
    let rows: Vec<&[f64]> = (0..table.len()).map(|h| table.row(h)).collect();
    Ok(json!({
        "n": n,
        "left_anchor": anchors.left_anchor,
        "right_anchor": anchors.right_anchor,
        "collapsed": anchors.is_collapsed(),
        "rows": rows,
        "distortion": distortion,
        "certificate_objective": cert.objective(),
        "lp_optimum": lp,
        "dp_passed": dp_check(&table, &1e-12).passed,
        "limit": 4.0 * theta / (1.0 - theta * theta),
    }))
}

/// Empirical law of the geometric step distance against `N_d θ^d / E`.
pub fn distance_sample_json(k: usize, theta: f64, draws: u32, seed: u64) -> Result<Value, String> {
    check_theta(theta)?;
    if !(2..=12).contains(&k) || draws == 0 || draws > MAX_DRAWS {
        return Err(format!("need 2 <= K <= 12 and 1 <= draws <= {MAX_DRAWS}"));
    }
    let law = DistanceLaw::new(k, theta, 100_000).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: Vec<u32> = Vec::new();
    for _ in 0..draws {
        let d = law.sample(&mut rng) as usize;
        if d >= counts.len() {
            counts.resize(d + 1, 0);
        }
        counts[d] += 1;
    }
    let expected: Vec<f64> = (0..counts.len() as u64)
        .map(|d| law.probability(d))
        .collect();
    Ok(json!({ "k": k, "theta": theta, "draws": draws, "counts": counts, "expected": expected }))
}

#[wasm_bindgen]
pub fn tradeoff_curve(k: usize, steps: u32) -> Result<String, JsValue> {
    wrap(tradeoff_curve_json(k, steps))
}

#[wasm_bindgen]
pub fn k2_mechanism(n: u32, theta: f64, p: f64) -> Result<String, JsValue> {
    wrap(k2_mechanism_json(n, theta, p))
}

#[wasm_bindgen]
pub fn distance_sample(k: usize, theta: f64, draws: u32, seed: u64) -> Result<String, JsValue> {
    wrap(distance_sample_json(k, theta, draws, seed))
}
