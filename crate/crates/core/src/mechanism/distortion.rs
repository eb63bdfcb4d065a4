use serde::Serialize;

use crate::ehrhart::{e_pf, e_pf_closed, EvalMode};
use crate::error::{Error, Result};
use crate::histogram::MultinomialPrior;
use crate::numeric::Scalar;

use super::table::KernelTable;

fn check_prior<S: Scalar>(table: &KernelTable<S>, prior: &MultinomialPrior<S>) -> Result<()> {
    if prior.k() != table.k() || prior.n() != table.n() {
        return Err(Error::DimensionMismatch(format!(
            "prior (n={}, K={}) vs mechanism (n={}, K={})",
            prior.n(),
            prior.k(),
            table.n(),
            table.k()
        )));
    }
    Ok(())
}

fn row_distortion<S: Scalar>(table: &KernelTable<S>, h: usize) -> S {
    let space = table.space();
    table
        .row(h)
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > S::zero())
        .fold(S::zero(), |acc, (g, p)| {
            acc + p.clone() * S::of_u64(space.l1(h, g))
        })
}

/// `sum_h P(h) sum_g W(g|h) |g - h|_1`.
pub fn expected_distortion<S: Scalar>(
    table: &KernelTable<S>,
    prior: &MultinomialPrior<S>,
) -> Result<S> {
    check_prior(table, prior)?;
    let space = table.space();
    Ok((0..table.len()).fold(S::zero(), |acc, h| {
        acc + prior.mass_of_counts(space.counts(h)) * row_distortion(table, h)
    }))
}

/// Distortion restricted to inputs of prior mass at least `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeavySetDistortion {
    pub value: f64,
    pub inputs_used: usize,
    pub neglected_mass: f64,
    /// `2n` times the neglected mass; no row can distort by more than `2n`.
    pub bound: f64,
}

pub fn expected_distortion_heavy<S: Scalar>(
    table: &KernelTable<S>,
    prior: &MultinomialPrior<S>,
    epsilon: &S,
) -> Result<HeavySetDistortion> {
    check_prior(table, prior)?;
    let space = table.space();
    let mut value = S::zero();
    let mut neglected = S::zero();
    let mut used = 0;
    for h in 0..table.len() {
        let mass = prior.mass_of_counts(space.counts(h));
        if mass >= *epsilon {
            value = value + mass * row_distortion(table, h);
            used += 1;
        } else {
            neglected = neglected + mass;
        }
    }
    let neglected = neglected.to_f64_lossy();
    Ok(HeavySetDistortion {
        value: value.to_f64_lossy(),
        inputs_used: used,
        neglected_mass: neglected,
        bound: 2.0 * table.n() as f64 * neglected,
    })
}

/// Distortion of the untruncated geometric kernel: `2θ E'(θ) / E(θ)`.
pub fn geometric_distortion_closed<S: Scalar>(k: usize, theta: &S) -> Result<S> {
    let (e, de) = e_pf_closed(k, theta)?;
    Ok(S::of_u64(2) * theta.clone() * de / e)
}

/// The same quantity as `sum_d 2d N_d θ^d / sum_d N_d θ^d`, summed term by
/// term from the face counts.
pub fn geometric_distortion_series(k: usize, theta: f64, tol: f64, max_terms: u64) -> Result<f64> {
    let s = e_pf(k, theta, EvalMode::Series { tol }, max_terms)?;
    Ok(2.0 * theta * s.derivative / s.value)
}
