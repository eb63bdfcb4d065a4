use crate::error::{Error, Result};
use crate::numeric::{multinomial, Scalar};

use super::point::Histogram;

/// Multinomial law of the histogram of `n` i.i.d. records with cell
/// probabilities `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultinomialPrior<S> {
    p: Vec<S>,
    n: u64,
}

impl<S: Scalar> MultinomialPrior<S> {
    pub fn new(p: Vec<S>, n: u64) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::InvalidParameter("prior needs K >= 2 cells".into()));
        }
        if let Some(bad) = p.iter().find(|x| **x <= S::zero()) {
            return Err(Error::InvalidParameter(format!(
                "prior entries must be positive, got {bad}"
            )));
        }
        let total = p.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !total.approx_eq(&S::one(), &S::tol()) {
            return Err(Error::InvalidParameter(format!(
                "prior sums to {total}, expected 1"
            )));
        }
        Ok(MultinomialPrior { p, n })
    }

    pub fn uniform(k: usize, n: u64) -> Result<Self> {
        let k_s = S::of_u64(k as u64);
        Self::new(vec![S::one() / k_s; k], n)
    }

    /// Two-cell prior `(p1, 1 - p1)`.
    pub fn binary(p1: S, n: u64) -> Result<Self> {
        let rest = S::one() - p1.clone();
        Self::new(vec![p1, rest], n)
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// Same cell probabilities for a different database size.
    pub fn with_n(&self, n: u64) -> Self {
        MultinomialPrior {
            p: self.p.clone(),
            n,
        }
    }

    /// `C(n; h) prod p_k^{h_k}`.
    pub fn mass(&self, h: &Histogram) -> Result<S> {
        if h.k() != self.k() {
            return Err(Error::mismatch(self.k(), h.k()));
        }
        if h.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "histogram total {} vs prior n {}",
                h.n(),
                self.n
            )));
        }
        Ok(self.mass_of_counts(&h.to_dense()))
    }

    /// Mass of a dense count vector assumed to sum to `n`.
    pub fn mass_of_counts(&self, counts: &[u64]) -> S {
        let coeff = S::from_biguint(&multinomial(counts.iter().copied()));
        counts
            .iter()
            .zip(&self.p)
            .filter(|(c, _)| **c > 0)
            .fold(coeff, |acc, (c, p)| acc * p.powu(*c))
    }
}

pub fn prior_mass<S: Scalar>(prior: &MultinomialPrior<S>, h: &Histogram) -> Result<S> {
    prior.mass(h)
}
