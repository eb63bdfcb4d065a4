use std::sync::Arc;

use crate::ehrhart::e_pf_closed;
use crate::error::{Error, Result};
use crate::histogram::{
    l1_distance, ExtendedHistogram, Histogram, HistogramSpace, MultinomialPrior,
};
use crate::limits::Limits;
use crate::numeric::Scalar;

use super::table::KernelTable;

/// `U(g|h) = θ^{|g-h|_1/2} / E(θ)` on the extended lattice. The prior plays
/// no role.
pub fn geometric_kernel_prob<S: Scalar>(
    k: usize,
    theta: &S,
    g: &ExtendedHistogram,
    h: &Histogram,
) -> Result<S> {
    if g.k() != k || h.k() != k {
        return Err(Error::DimensionMismatch(format!(
            "K={k} with points of dimension {} and {}",
            g.k(),
            h.k()
        )));
    }
    let (e, _) = e_pf_closed(k, theta)?;
    let dist = l1_distance(g, h)?;
    Ok(theta.powu(dist / 2) / e)
}

/// Largest-remainder rounding of `n p` to a histogram summing to `n`
/// (ties go to the lower cell index).
pub fn truncation_center<S: Scalar>(prior: &MultinomialPrior<S>) -> Histogram {
    let n = prior.n();
    let targets: Vec<S> = prior.p().iter().map(|p| p.clone() * S::of_u64(n)).collect();
    let mut counts: Vec<u64> = targets.iter().map(Scalar::floor_u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    let remainder = |i: usize| targets[i].clone() - S::of_u64(counts[i]);
    order.sort_by(|&a, &b| {
        remainder(b)
            .partial_cmp(&remainder(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    Histogram::new(counts).expect("K >= 2")
}

/// The deterministic second stage of the cascade.
#[derive(Clone, Debug, PartialEq)]
pub enum TruncationSpec {
    /// Points within L1 distance `radius` of `center` are kept, every other
    /// point is sent to `center`.
    Ball { center: Histogram, radius: f64 },
    /// `K = 2` only: the first coordinate is clamped to `[lo, hi]`.
    Interval { n: u64, lo: u64, hi: u64 },
}

impl TruncationSpec {
    /// A ball that must fit inside the simplex; otherwise the error carries
    /// the largest radius that would.
    pub fn ball(center: Histogram, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be finite and non-negative, got {radius}"
            )));
        }
        // A lattice point at L1 distance 2m from the center moved m units,
        // so the ball stays inside iff every cell can give floor(r/2).
        let min_cell = center.to_dense().into_iter().min().unwrap_or(0);
        if (radius / 2.0).floor() > min_cell as f64 {
            return Err(Error::BallOutsideSimplex {
                radius,
                max_feasible: 2 * min_cell + 1,
            });
        }
        Ok(TruncationSpec::Ball { center, radius })
    }

    /// Ball of radius `radius_const * n^{2/3}` around the rounded mean.
    pub fn default_ball<S: Scalar>(prior: &MultinomialPrior<S>, radius_const: f64) -> Result<Self> {
        let radius = radius_const * (prior.n() as f64).powf(2.0 / 3.0);
        Self::ball(truncation_center(prior), radius)
    }

    pub fn interval(n: u64, lo: u64, hi: u64) -> Result<Self> {
        if lo > hi || hi > n {
            return Err(Error::InvalidParameter(format!(
                "interval [{lo}, {hi}] must sit inside [0, {n}]"
            )));
        }
        Ok(TruncationSpec::Interval { n, lo, hi })
    }

    fn check_space(&self, n: u64, k: usize) -> Result<()> {
        let (tn, tk) = match self {
            TruncationSpec::Ball { center, .. } => (center.n(), center.k()),
            TruncationSpec::Interval { n, .. } => (*n, 2),
        };
        if (tn, tk) != (n, k) {
            return Err(Error::DimensionMismatch(format!(
                "truncation built for n={tn}, K={tk}, mechanism has n={n}, K={k}"
            )));
        }
        Ok(())
    }

    /// Maps an extended-lattice point into the simplex.
    pub fn apply(&self, g: &ExtendedHistogram) -> Result<Histogram> {
        match self {
            TruncationSpec::Ball { center, radius } => {
                if l1_distance(g, center)? as f64 <= *radius {
                    Ok(g.to_histogram().expect("ball lies inside the simplex"))
                } else {
                    Ok(center.clone())
                }
            }
            TruncationSpec::Interval { n, lo, hi } => {
                if g.k() != 2 || g.n() != *n as i64 {
                    return Err(Error::DimensionMismatch(format!(
                        "interval truncation expects K=2, n={n}"
                    )));
                }
                let first = g.counts()[0].clamp(*lo as i64, *hi as i64) as u64;
                Histogram::new(vec![first, n - first])
            }
        }
    }
}

/// `W = V ∘ U` as an exact finite table. Outputs kept by the truncation get
/// their geometric mass; the absorbing output gets one minus the rest, which
/// accounts for the whole extended-lattice tail.
pub fn build_cascade_mechanism<S: Scalar>(
    n: u64,
    k: usize,
    theta: S,
    trunc: &TruncationSpec,
    limits: &Limits,
) -> Result<KernelTable<S>> {
    trunc.check_space(n, k)?;
    let space = Arc::new(HistogramSpace::new(n, k, limits)?);
    let (e, _) = e_pf_closed(k, &theta)?;
    let size = space.len();
    let max_dist = (2 * n) as usize;
    let kernel: Vec<S> = (0..=max_dist / 2)
        .map(|d| theta.powu(d as u64) / e.clone())
        .collect();
    let rows = match trunc {
        TruncationSpec::Ball { center, radius } => {
            let c = space
                .index_of(&center.to_dense())
                .expect("center belongs to the space");
            let kept: Vec<usize> = (0..size)
                .filter(|&g| g != c && space.l1(g, c) as f64 <= *radius)
                .collect();
            (0..size)
                .map(|h| {
                    let mut row = vec![S::zero(); size];
                    let mut kept_mass = S::zero();
                    for &g in &kept {
                        let p = kernel[(space.l1(g, h) / 2) as usize].clone();
                        kept_mass = kept_mass + p.clone();
                        row[g] = p;
                    }
                    row[c] = S::one() - kept_mass;
                    row
                })
                .collect()
        }
        TruncationSpec::Interval { lo, hi, .. } => (0..=n)
            .map(|i| interval_row(n, i, *lo, *hi, &theta))
            .collect(),
    };
    KernelTable::new(space, theta, rows)
}

/// One row of the two-sided fold of the `K = 2` geometric kernel.
fn interval_row<S: Scalar>(n: u64, i: u64, lo: u64, hi: u64, theta: &S) -> Vec<S> {
    let one = S::one();
    let denom = one.clone() + theta.clone();
    let inner = (one.clone() - theta.clone()) / denom.clone();
    let mut row = vec![S::zero(); n as usize + 1];
    if lo == hi {
        row[lo as usize] = one;
        return row;
    }
    for j in lo + 1..hi {
        row[j as usize] = theta.powu(i.abs_diff(j)) * inner.clone();
    }
    // Mass of the extended kernel at first coordinate <= lo (resp. >= hi).
    row[lo as usize] = if i >= lo {
        theta.powu(i - lo) / denom.clone()
    } else {
        one.clone() - theta.powu(lo + 1 - i) / denom.clone()
    };
    row[hi as usize] = if i <= hi {
        theta.powu(hi - i) / denom
    } else {
        one - theta.powu(i + 1 - hi) / denom
    };
    row
}
