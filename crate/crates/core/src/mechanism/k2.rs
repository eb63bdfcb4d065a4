use std::sync::Arc;

use crate::ehrhart::check_theta;
use crate::error::{Error, Result};
use crate::histogram::{HistogramSpace, MultinomialPrior};
use crate::limits::Limits;
use crate::numeric::Scalar;

use super::table::KernelTable;

/// Weighted geometric sums of a `K = 2` weight sequence and the fold
/// points they determine.
///
/// `forward[i] = θ forward[i-1] + 2 w_i`, `backward[i] = θ backward[i+1] + 2 w_i`.
/// The left anchor is the least `i` with `forward[k-1] >= θ backward[k]` for
/// every `k >= i`; the right anchor is the greatest `i` with
/// `backward[k+1] >= θ forward[k]` for every `k <= i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchorData<S> {
    pub theta: S,
    pub weights: Vec<S>,
    pub forward: Vec<S>,
    pub backward: Vec<S>,
    /// In `1..=n+1`.
    pub left_anchor: i64,
    /// In `-1..=n-1`.
    pub right_anchor: i64,
}

impl<S: Scalar> AnchorData<S> {
    pub fn n(&self) -> u64 {
        self.weights.len() as u64 - 1
    }

    /// `forward[i]` with `forward[-1] = 0`.
    pub fn forward_at(&self, i: i64) -> S {
        if i < 0 || i > self.n() as i64 {
            S::zero()
        } else {
            self.forward[i as usize].clone()
        }
    }

    /// `backward[i]` with `backward[n+1] = 0`.
    pub fn backward_at(&self, i: i64) -> S {
        if i < 0 || i > self.n() as i64 {
            S::zero()
        } else {
            self.backward[i as usize].clone()
        }
    }

    /// The fold points `(left_anchor - 1, right_anchor + 1)`.
    ///
    /// Both lie in `[0, n]`: `backward[0] > 0` makes the left scan fail at
    /// 0 and `forward[n] > 0` makes the right scan fail at `n`.
    pub fn window(&self) -> (u64, u64) {
        (
            (self.left_anchor - 1) as u64,
            (self.right_anchor + 1) as u64,
        )
    }

    /// Both fold points coincide (`left_anchor = right_anchor + 2`), which
    /// happens at small `n` and large `θ`. The fold is then the constant map
    /// onto that point.
    pub fn is_collapsed(&self) -> bool {
        self.left_anchor == self.right_anchor + 2
    }
}

pub fn compute_anchors<S: Scalar>(weights: &[S], theta: &S) -> Result<AnchorData<S>> {
    check_theta(theta)?;
    if weights.is_empty() {
        return Err(Error::InvalidParameter("weights must be non-empty".into()));
    }
    if weights.iter().any(|w| *w < S::zero()) {
        return Err(Error::InvalidParameter(
            "weights must be non-negative".into(),
        ));
    }
    if weights.iter().all(|w| w.is_zero()) {
        return Err(Error::InvalidParameter(
            "weights must not all vanish".into(),
        ));
    }
    let two = S::of_u64(2);
    let len = weights.len();
    let mut forward = Vec::with_capacity(len);
    let mut acc = S::zero();
    for w in weights {
        acc = theta.clone() * acc + two.clone() * w.clone();
        forward.push(acc.clone());
    }
    let mut backward = vec![S::zero(); len];
    let mut acc = S::zero();
    for (i, w) in weights.iter().enumerate().rev() {
        acc = theta.clone() * acc + two.clone() * w.clone();
        backward[i] = acc.clone();
    }
    let mut data = AnchorData {
        theta: theta.clone(),
        weights: weights.to_vec(),
        forward,
        backward,
        left_anchor: 0,
        right_anchor: 0,
    };
    let n = len as i64 - 1;
    let left_ok =
        |k: i64| data.forward_at(k - 1) - theta.clone() * data.backward_at(k) >= S::zero();
    let right_ok =
        |k: i64| data.backward_at(k + 1) - theta.clone() * data.forward_at(k) >= S::zero();
    let left = (0..=n).rev().find(|&k| !left_ok(k)).map_or(0, |k| k + 1);
    let right = (0..=n).find(|&k| !right_ok(k)).map_or(n, |k| k - 1);
    if left > right + 2 {
        return Err(Error::DegenerateAnchors(format!(
            "left anchor {left} lies beyond right anchor {right} + 2"
        )));
    }
    data.left_anchor = left;
    data.right_anchor = right;
    Ok(data)
}

/// Binomial weights `C(n,i) p^i (1-p)^{n-i}` indexed by the first count.
pub fn binomial_weights<S: Scalar>(prior: &MultinomialPrior<S>) -> Result<Vec<S>> {
    if prior.k() != 2 {
        return Err(Error::InvalidParameter(format!(
            "binomial weights need K=2, got K={}",
            prior.k()
        )));
    }
    let n = prior.n();
    Ok((0..=n).map(|i| prior.mass_of_counts(&[i, n - i])).collect())
}

/// The `K = 2` truncated geometric mechanism folded at `A - 1` and `B + 1`,
/// written out entry by entry. When the fold points coincide every input
/// goes to that point.
pub fn build_k2_mechanism<S: Scalar>(
    theta: S,
    prior: &MultinomialPrior<S>,
    limits: &Limits,
) -> Result<(KernelTable<S>, AnchorData<S>)> {
    let weights = binomial_weights(prior)?;
    let anchors = compute_anchors(&weights, &theta)?;
    let n = prior.n();
    let space = Arc::new(HistogramSpace::new(n, 2, limits)?);
    let (a, b) = (anchors.left_anchor, anchors.right_anchor);
    let one = S::one();
    let denom = one.clone() + theta.clone();
    let inner = (one.clone() - theta.clone()) / denom.clone();
    let entry = |i: i64, j: i64| -> S {
        if anchors.is_collapsed() {
            return if j == a - 1 { one.clone() } else { S::zero() };
        }
        let pow = |e: i64| theta.powu(e as u64);
        if (a..=b).contains(&j) {
            pow((j - i).abs()) * inner.clone()
        } else if j == a - 1 {
            if i >= j {
                pow(i - j) / denom.clone()
            } else {
                one.clone() - pow(a - i) / denom.clone()
            }
        } else if j == b + 1 {
            if i <= j {
                pow(j - i) / denom.clone()
            } else {
                one.clone() - pow(i - b) / denom.clone()
            }
        } else {
            S::zero()
        }
    };
    let rows = (0..=n as i64)
        .map(|i| (0..=n as i64).map(|j| entry(i, j)).collect())
        .collect();
    let table = KernelTable::new(space, theta, rows)?;
    Ok((table, anchors))
}
