use serde::Serialize;

use crate::error::{Error, Result};
use crate::histogram::MultinomialPrior;
use crate::limits::Limits;
use crate::mechanism::{build_k2_mechanism, expected_distortion};

use super::certificate::build_k2_certificate;

/// Directions along which the optimal `K = 2` mechanism is perturbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    /// Moves `ε θ^{|j-(i-1)|}` from output `i-1` to output `i` in every row
    /// `j`, loosening the row `W(i|i-1) - θ W(i|i) >= 0` by `ε(1-θ²)`.
    /// Valid for `i` in `[A, B+1]`.
    LeftPair,
    /// The mirror image: output `i+1` to output `i`, valid for `i` in
    /// `[A-1, B]`.
    RightPair,
    /// Adds mass around output `i` so that only row `i` changes its sum, by
    /// `ε(1-θ²)`. Valid for `i` in `[A, B]`.
    RowSum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowProbe {
    pub kind: ProbeKind,
    pub index: u64,
    pub eps: f64,
    /// Change in expected distortion over change in the perturbed
    /// constraint.
    pub ratio: f64,
    /// The matching multiplier of the `K = 2` certificate.
    pub certificate_value: f64,
}

impl ShadowProbe {
    pub fn relative_error(&self) -> f64 {
        (self.ratio - self.certificate_value).abs()
            / self.certificate_value.abs().max(f64::MIN_POSITIVE)
    }
}

/// Perturbs the optimal `K = 2` mechanism at index `i` and reports the
/// ratio of the distortion change to the constraint change.
pub fn shadow_price_probe(
    theta: f64,
    prior: &MultinomialPrior<f64>,
    i: u64,
    kind: ProbeKind,
    eps: f64,
) -> Result<ShadowProbe> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let (table, anchors) = build_k2_mechanism(theta, prior, &Limits::default())?;
    let (cert, _) = build_k2_certificate(&theta, prior)?;
    let (a, b) = (anchors.left_anchor, anchors.right_anchor);
    let domain = match kind {
        ProbeKind::LeftPair => (a, b + 1),
        ProbeKind::RightPair => (a - 1, b),
        ProbeKind::RowSum => (a, b),
    };
    let i = i as i64;
    if anchors.is_collapsed() || i < domain.0 || i > domain.1 {
        return Err(Error::Regime(format!(
            "{kind:?} needs i in [{}, {}] (anchors {a}, {b}), got {i}",
            domain.0, domain.1
        )));
    }
    let n = prior.n() as i64;
    let pow = |e: i64| theta.powi(e.unsigned_abs() as i32);
    let mut rows: Vec<Vec<f64>> = (0..=n as usize).map(|h| table.row(h).to_vec()).collect();
    let (delta_constraint, certificate_value) = match kind {
        ProbeKind::LeftPair => {
            for (j, row) in rows.iter_mut().enumerate() {
                let d = eps * pow(j as i64 - (i - 1));
                row[(i - 1) as usize] -= d;
                row[i as usize] += d;
            }
            let before = table.prob((i - 1) as usize, i as usize)
                - theta * table.prob(i as usize, i as usize);
            let after = rows[(i - 1) as usize][i as usize] - theta * rows[i as usize][i as usize];
            (
                after - before,
                cert.lambda(i as usize, (i - 1) as usize, i as usize),
            )
        }
        ProbeKind::RightPair => {
            for (j, row) in rows.iter_mut().enumerate() {
                let d = eps * pow(j as i64 - (i + 1));
                row[(i + 1) as usize] -= d;
                row[i as usize] += d;
            }
            let before = table.prob((i + 1) as usize, i as usize)
                - theta * table.prob(i as usize, i as usize);
            let after = rows[(i + 1) as usize][i as usize] - theta * rows[i as usize][i as usize];
            (
                after - before,
                cert.lambda(i as usize, (i + 1) as usize, i as usize),
            )
        }
        ProbeKind::RowSum => {
            for (j, row) in rows.iter_mut().enumerate() {
                let j = j as i64;
                let left = eps * pow(j - (i - 1)) * theta;
                let right = eps * pow(j - (i + 1)) * theta;
                row[(i - 1) as usize] -= left;
                row[(i + 1) as usize] -= right;
                row[i as usize] += if j == i {
                    eps * (1.0 + theta * theta)
                } else {
                    left + right
                };
            }
            let sum: f64 = rows[i as usize].iter().sum();
            (sum - 1.0, cert.mu[i as usize])
        }
    };
    let before = expected_distortion(&table, prior)?;
    let after = raw_distortion(&rows, prior);
    Ok(ShadowProbe {
        kind,
        index: i as u64,
        eps,
        ratio: (after - before) / delta_constraint,
        certificate_value,
    })
}

fn raw_distortion(rows: &[Vec<f64>], prior: &MultinomialPrior<f64>) -> f64 {
    let n = prior.n();
    rows.iter()
        .enumerate()
        .map(|(h, row)| {
            let mass = prior.mass_of_counts(&[h as u64, n - h as u64]);
            mass * row
                .iter()
                .enumerate()
                .map(|(g, w)| w * 2.0 * (g as f64 - h as f64).abs())
                .sum::<f64>()
        })
        .sum()
}
