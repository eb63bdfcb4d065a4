use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use super::counting::face_count;
use crate::error::{Error, Result};
use crate::numeric::{binomial, Scalar};

pub(crate) fn check_theta<S: Scalar>(theta: &S) -> Result<()> {
    if *theta <= S::zero() || *theta >= S::one() {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// `S(θ) = sum_j θ^j C(K-1, j)^2` and its derivative.
pub fn s_polynomial<S: Scalar>(k: usize, theta: &S) -> Result<(S, S)> {
    check_k(k)?;
    let m = k as u64 - 1;
    let mut value = S::zero();
    let mut deriv = S::zero();
    for j in 0..=m {
        let c = binomial(m, j);
        let c2 = S::from_biguint(&(&c * &c));
        value = value + c2.clone() * theta.powu(j);
        if j > 0 {
            deriv = deriv + c2 * S::of_u64(j) * theta.powu(j - 1);
        }
    }
    Ok((value, deriv))
}

/// Legendre polynomial `L_m(x)` by the three-term recurrence.
pub fn legendre<S: Scalar>(m: u64, x: &S) -> S {
    let mut prev = S::one();
    if m == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for j in 1..m {
        let jj = S::of_u64(j);
        let next = (S::of_u64(2 * j + 1) * x.clone() * cur.clone() - jj * prev) / S::of_u64(j + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Value and derivative of a generating function at θ, with truncation data
/// when produced by summing a series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesEval {
    pub k: usize,
    pub theta: f64,
    pub value: f64,
    pub derivative: f64,
    /// Number of terms summed (zero for closed forms).
    pub depth: u64,
    pub tail_bound: f64,
}

/// How to evaluate the face-count generating function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalMode {
    Closed,
    Series { tol: f64 },
}

/// `E(θ) = 1 + sum_d N_d θ^d = S(θ) / (1-θ)^{K-1}` and its derivative, exactly.
pub fn e_pf_closed<S: Scalar>(k: usize, theta: &S) -> Result<(S, S)> {
    check_theta(theta)?;
    let (s, ds) = s_polynomial(k, theta)?;
    let m = k as u64 - 1;
    let one_minus = S::one() - theta.clone();
    let denom = one_minus.powu(m);
    let value = s.clone() / denom.clone();
    let deriv = ds / denom.clone() + S::of_u64(m) * s / (denom * one_minus);
    Ok((value, deriv))
}

pub fn e_pf(k: usize, theta: f64, mode: EvalMode, max_terms: u64) -> Result<SeriesEval> {
    match mode {
        EvalMode::Closed => {
            let (value, derivative) = e_pf_closed(k, &theta)?;
            Ok(SeriesEval {
                k,
                theta,
                value,
                derivative,
                depth: 0,
                tail_bound: 0.0,
            })
        }
        EvalMode::Series { tol } => sum_series(k, theta, tol, max_terms, |d| face_count(k, d)),
    }
}

/// Ehrhart series `Ehr(θ) = sum_{d>=0} L_P(d) θ^d` and its derivative, by
/// direct summation of the dilation counts.
pub fn ehrhart_series(k: usize, theta: f64, tol: f64, max_terms: u64) -> Result<SeriesEval> {
    let mut running = BigUint::from(1u32);
    sum_series(k, theta, tol, max_terms, move |d| {
        if d > 0 {
            running += face_count(k, d)?;
        }
        Ok(running.clone())
    })
}

/// Sums `sum_d c_d θ^d` and `sum_d d c_d θ^{d-1}`, stopping once both
/// relative increments fall below `tol` and at least `2K` terms were used.
fn sum_series<F>(k: usize, theta: f64, tol: f64, max_terms: u64, mut coeff: F) -> Result<SeriesEval>
where
    F: FnMut(u64) -> Result<BigUint>,
{
    check_k(k)?;
    check_theta(&theta)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let min_terms = 2 * k as u64;
    let mut value = 0.0;
    let mut deriv = 0.0;
    let mut prev_term = 0.0;
    for d in 0..max_terms {
        let c = f64::from_biguint(&coeff(d)?);
        let term = c * theta.powu(d);
        let dterm = if d == 0 {
            0.0
        } else {
            d as f64 * c * theta.powu(d - 1)
        };
        value += term;
        deriv += dterm;
        let used = d + 1;
        if used >= min_terms && term < tol * value && dterm < tol * deriv {
            let ratio = if prev_term > 0.0 {
                term / prev_term
            } else {
                theta
            };
            let tail_bound = if ratio < 1.0 {
                term * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            return Ok(SeriesEval {
                k,
                theta,
                value,
                derivative: deriv,
                depth: used,
                tail_bound,
            });
        }
        prev_term = term;
    }
    Err(Error::InvalidParameter(format!(
        "series did not reach tol {tol} within {max_terms} terms"
    )))
}

/// Probability that the geometric kernel moves a histogram by graph
/// distance `d`: `N_d θ^d / E(θ)` with `N_0 = 1`.
pub fn distance_probability<S: Scalar>(k: usize, theta: &S, d: u64) -> Result<S> {
    let (e, _) = e_pf_closed(k, theta)?;
    Ok(S::from_biguint(&face_count(k, d)?) * theta.powu(d) / e)
}

/// Closed forms of the limiting minimum distortion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DStarForm {
    /// `2θ Ehr'/Ehr - 2θ/(1-θ)` with the Ehrhart series summed numerically.
    Ehrhart,
    /// `2θ((K-1)/(1-θ) + S'/S)`.
    SForm,
    /// `K (L_K(y)/L_{K-1}(y) - y)` with `y = (1+θ)/(1-θ)`.
    LegendreCorrected,
}

impl DStarForm {
    pub const ALL: [DStarForm; 3] = [
        DStarForm::Ehrhart,
        DStarForm::SForm,
        DStarForm::LegendreCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DStarForm::Ehrhart => "ehrhart",
            DStarForm::SForm => "s-form",
            DStarForm::LegendreCorrected => "legendre-corrected",
        }
    }
}

impl FromStr for DStarForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DStarForm::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown form `{s}`")))
    }
}

pub fn dstar_sform<S: Scalar>(k: usize, theta: &S) -> Result<S> {
    check_theta(theta)?;
    let (s, ds) = s_polynomial(k, theta)?;
    let two_theta = S::of_u64(2) * theta.clone();
    let m = S::of_u64(k as u64 - 1);
    Ok(two_theta * (m / (S::one() - theta.clone()) + ds / s))
}

fn legendre_argument<S: Scalar>(theta: &S) -> S {
    (S::one() + theta.clone()) / (S::one() - theta.clone())
}

pub fn dstar_legendre_corrected<S: Scalar>(k: usize, theta: &S) -> Result<S> {
    check_k(k)?;
    check_theta(theta)?;
    let y = legendre_argument(theta);
    let ratio = legendre(k as u64, &y) / legendre(k as u64 - 1, &y);
    Ok(S::of_u64(k as u64) * (ratio - y))
}

/// The Legendre expression with the sign pattern `K (y + L_K/L_{K-1})`.
/// It disagrees with every other form and is kept only for reporting.
pub fn corollary_as_printed<S: Scalar>(k: usize, theta: &S) -> Result<S> {
    check_k(k)?;
    check_theta(theta)?;
    let y = legendre_argument(theta);
    let ratio = legendre(k as u64, &y) / legendre(k as u64 - 1, &y);
    Ok(S::of_u64(k as u64) * (y + ratio))
}

pub fn dstar_ehrhart(k: usize, theta: f64, tol: f64, max_terms: u64) -> Result<f64> {
    let ehr = ehrhart_series(k, theta, tol, max_terms)?;
    Ok(2.0 * theta * ehr.derivative / ehr.value - 2.0 * theta / (1.0 - theta))
}

/// Float evaluation of any form; `tol` only matters for the series form.
pub fn dstar_limit(k: usize, theta: f64, form: DStarForm, tol: f64) -> Result<f64> {
    match form {
        DStarForm::Ehrhart => dstar_ehrhart(k, theta, tol, 1_000_000),
        DStarForm::SForm => dstar_sform(k, &theta),
        DStarForm::LegendreCorrected => dstar_legendre_corrected(k, &theta),
    }
}
