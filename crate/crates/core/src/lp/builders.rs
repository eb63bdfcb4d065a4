use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::histogram::{HistogramSpace, MultinomialPrior};
use crate::limits::Limits;
use crate::mechanism::KernelTable;
use crate::numeric::Scalar;

use super::certificate::DualCertificate;
use super::program::{Bound, LinearProgram, Relation, Sense};

pub fn primal_var(g: usize, h: usize) -> String {
    format!("W_g{g}_h{h}")
}

/// Multiplier of the privacy row `W(g|h) - θ W(g|hhat) >= 0`.
pub fn lambda_var(g: usize, h: usize, hhat: usize) -> String {
    format!("L_g{g}_p{h}_{hhat}")
}

pub fn mu_var(h: usize) -> String {
    format!("MU_h{h}")
}

fn check_inputs<S: Scalar>(
    n: u64,
    k: usize,
    prior: &MultinomialPrior<S>,
    limits: &Limits,
) -> Result<HistogramSpace> {
    if prior.k() != k || prior.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "prior (n={}, K={}) vs LP (n={n}, K={k})",
            prior.n(),
            prior.k()
        )));
    }
    let size = crate::histogram::histogram_count(n, k);
    let vars = &size * &size;
    if vars > BigUint::from(limits.lp_variables) {
        return Err(Error::capacity(
            "LP",
            format!("{vars} variables ({size} histograms squared)"),
            limits.lp_variables,
        ));
    }
    HistogramSpace::new(n, k, limits)
}

/// `min sum_h P(h) sum_g W(g|h) |g-h|_1` over row-stochastic `W` with
/// `W(g|h) >= θ W(g|hhat)` for every ordered neighbor pair and output.
/// Variable `W_g<g>_h<h>` has index `h * |H| + g`.
pub fn build_primal_lp<S: Scalar>(
    n: u64,
    k: usize,
    theta: &S,
    prior: &MultinomialPrior<S>,
    limits: &Limits,
) -> Result<LinearProgram<S>> {
    let space = check_inputs(n, k, prior, limits)?;
    let size = space.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    for h in 0..size {
        let mass = prior.mass_of_counts(space.counts(h));
        for g in 0..size {
            let cost = mass.clone() * S::of_u64(space.l1(h, g));
            lp.add_variable(primal_var(g, h), Bound::NonNegative, cost)?;
        }
    }
    let var = |g: usize, h: usize| h * size + g;
    for h in 0..size {
        let terms = (0..size).map(|g| (var(g, h), S::one())).collect();
        lp.add_constraint(format!("row_h{h}"), terms, Relation::Eq, S::one())?;
    }
    for (h, hh) in space.ordered_pairs() {
        for g in 0..size {
            lp.add_constraint(
                format!("dp_g{g}_p{h}_{hh}"),
                vec![(var(g, h), S::one()), (var(g, hh), -theta.clone())],
                Relation::Ge,
                S::zero(),
            )?;
        }
    }
    Ok(lp)
}

/// The dual of [`build_primal_lp`]: maximise `sum_h MU_h` subject to, for
/// every `(h, g)`,
/// `MU_h + sum_{hhat ~ h} L_{g|(h,hhat)} - θ sum_{h' ~ h} L_{g|(h',h)} <= P(h) |g-h|_1`.
pub fn build_dual_lp<S: Scalar>(
    n: u64,
    k: usize,
    theta: &S,
    prior: &MultinomialPrior<S>,
    limits: &Limits,
) -> Result<LinearProgram<S>> {
    let space = check_inputs(n, k, prior, limits)?;
    let size = space.len();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let mu: Vec<usize> = (0..size)
        .map(|h| lp.add_variable(mu_var(h), Bound::Free, S::one()))
        .collect::<Result<_>>()?;
    let mut lambda = std::collections::HashMap::new();
    for (h, hh) in space.ordered_pairs() {
        for g in 0..size {
            let id = lp.add_variable(lambda_var(g, h, hh), Bound::NonNegative, S::zero())?;
            lambda.insert((g, h, hh), id);
        }
    }
    for h in 0..size {
        let mass = prior.mass_of_counts(space.counts(h));
        for g in 0..size {
            let mut terms = vec![(mu[h], S::one())];
            for &nb in space.neighbors(h) {
                terms.push((lambda[&(g, h, nb)], S::one()));
                terms.push((lambda[&(g, nb, h)], -theta.clone()));
            }
            let rhs = mass.clone() * S::of_u64(space.l1(h, g));
            lp.add_constraint(format!("dual_h{h}_g{g}"), terms, Relation::Le, rhs)?;
        }
    }
    Ok(lp)
}

/// Reads the mechanism out of a solution of [`build_primal_lp`]. Entries
/// within the solver tolerance of zero are clamped to zero.
pub fn table_from_primal<S: Scalar>(
    space: Arc<HistogramSpace>,
    theta: S,
    solution: &[S],
) -> Result<KernelTable<S>> {
    let size = space.len();
    if solution.len() != size * size {
        return Err(Error::mismatch(solution.len(), size * size));
    }
    let rows = solution
        .chunks(size)
        .map(|row| {
            row.iter()
                .map(|v| {
                    if *v < S::zero() && -v.clone() <= S::tol() {
                        S::zero()
                    } else {
                        v.clone()
                    }
                })
                .collect()
        })
        .collect();
    KernelTable::new(space, theta, rows)
}

/// Reads a certificate out of a solution of [`build_dual_lp`].
pub fn certificate_from_dual<S: Scalar>(
    lp: &LinearProgram<S>,
    space: &HistogramSpace,
    solution: &[S],
) -> Result<DualCertificate<S>> {
    if solution.len() != lp.num_variables() {
        return Err(Error::mismatch(solution.len(), lp.num_variables()));
    }
    let mut cert = DualCertificate::zero(space.n(), space.k(), space.len());
    for h in 0..space.len() {
        let j = lp
            .variable(&mu_var(h))
            .ok_or_else(|| Error::InvalidParameter(format!("missing {}", mu_var(h))))?;
        cert.mu[h] = solution[j].clone();
    }
    for (h, hh) in space.ordered_pairs() {
        for g in 0..space.len() {
            let name = lambda_var(g, h, hh);
            let j = lp
                .variable(&name)
                .ok_or_else(|| Error::InvalidParameter(format!("missing {name}")))?;
            if !solution[j].is_zero() {
                cert.lambda.insert((g, h, hh), solution[j].clone());
            }
        }
    }
    Ok(cert)
}
