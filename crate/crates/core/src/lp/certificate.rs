use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::ehrhart::check_theta;
use crate::error::{Error, Result};
use crate::histogram::{HistogramSpace, MultinomialPrior};
use crate::limits::Limits;
use crate::mechanism::{binomial_weights, compute_anchors, AnchorData, KernelTable};
use crate::numeric::Scalar;

/// Index triple `(g, h, h_hat)` of the multiplier attached to the primal row
/// `W(g|h) - θ W(g|h_hat) >= 0`.
pub type LambdaKey = (usize, usize, usize);

/// A candidate solution of the dual program. Multipliers absent from
/// `lambda` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate<S> {
    pub n: u64,
    pub k: usize,
    pub lambda: BTreeMap<LambdaKey, S>,
    pub mu: Vec<S>,
    /// Construction remarks, for instance pairs with a non-positive
    /// denominator.
    pub notes: Vec<String>,
}

impl<S: Scalar> DualCertificate<S> {
    pub fn zero(n: u64, k: usize, size: usize) -> Self {
        DualCertificate {
            n,
            k,
            lambda: BTreeMap::new(),
            mu: vec![S::zero(); size],
            notes: Vec::new(),
        }
    }

    pub fn lambda(&self, g: usize, h: usize, hh: usize) -> S {
        self.lambda
            .get(&(g, h, hh))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn objective(&self) -> S {
        self.mu.iter().fold(S::zero(), |acc, m| acc + m.clone())
    }

    pub fn min_lambda(&self) -> S {
        self.lambda
            .values()
            .fold(S::zero(), |acc, v| if *v < acc { v.clone() } else { acc })
    }

    fn set(&mut self, key: LambdaKey, value: S) {
        if value.is_zero() {
            self.lambda.remove(&key);
        } else {
            self.lambda.insert(key, value);
        }
    }
}

/// The `K = 2` dual assignment together with the anchors it is built from.
///
/// Histogram `(i, n-i)` has index `i`. With `f`, `b` the forward and
/// backward sums and `A`, `B` the anchors:
///
/// * `λ(j | i-1, i)` is `0` for `j <= i-1`; for `i <= A-1` it is
///   `(j - (A-1)) f[i-1]` when `j >= A` and `0` otherwise; else
///   `(f[i-1] - θ b[i]) / (1-θ²) + (j-i) f[i-1]`.
/// * `λ(j | i+1, i)` mirrors it with `b` and `B`.
/// * `μ_i` is `2C_i (A-1-i)` left of the window, `2C_i (i-B-1)` right of it
///   and `f_i + b_i - 4C_i/(1-θ²)` inside.
pub fn build_k2_certificate<S: Scalar>(
    theta: &S,
    prior: &MultinomialPrior<S>,
) -> Result<(DualCertificate<S>, AnchorData<S>)> {
    let weights = binomial_weights(prior)?;
    let anchors = compute_anchors(&weights, theta)?;
    let n = prior.n() as i64;
    let (a, b) = (anchors.left_anchor, anchors.right_anchor);
    let two = S::of_u64(2);
    let one_minus_sq = S::one() - theta.clone() * theta.clone();
    let f = |i: i64| anchors.forward_at(i);
    let bk = |i: i64| anchors.backward_at(i);
    let c = |i: i64| weights[i as usize].clone();
    let int = |v: i64| S::of_i64(v);

    let mut cert = DualCertificate::zero(prior.n(), 2, weights.len());
    for i in 1..=n {
        for j in i..=n {
            let v = if i <= a - 1 {
                if j >= a {
                    int(j - (a - 1)) * f(i - 1)
                } else {
                    S::zero()
                }
            } else {
                (f(i - 1) - theta.clone() * bk(i)) / one_minus_sq.clone() + int(j - i) * f(i - 1)
            };
            cert.set((j as usize, (i - 1) as usize, i as usize), v);
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = if i >= b + 1 {
                if j <= b {
                    int((b + 1) - j) * bk(i + 1)
                } else {
                    S::zero()
                }
            } else {
                (bk(i + 1) - theta.clone() * f(i)) / one_minus_sq.clone() + int(i - j) * bk(i + 1)
            };
            cert.set((j as usize, (i + 1) as usize, i as usize), v);
        }
    }
    for i in 0..=n {
        cert.mu[i as usize] = if i < a - 1 {
            two.clone() * c(i) * int(a - 1 - i)
        } else if i > b + 1 {
            two.clone() * c(i) * int(i - b - 1)
        } else {
            f(i) + bk(i) - S::of_u64(4) * c(i) / one_minus_sq.clone()
        };
    }
    if anchors.is_collapsed() {
        cert.notes
            .push(format!("collapsed window: both fold points at {}", a - 1));
    }
    Ok((cert, anchors))
}

/// The second in-window expression for `μ_i`,
/// `θ (f[i-1] + b[i+1]) - 4 θ² C_i / (1-θ²)`.
pub fn k2_mu_alternative<S: Scalar>(anchors: &AnchorData<S>, i: u64) -> S {
    let theta = &anchors.theta;
    let i = i as i64;
    let sq = theta.clone() * theta.clone();
    theta.clone() * (anchors.forward_at(i - 1) + anchors.backward_at(i + 1))
        - S::of_u64(4) * sq.clone() * anchors.weights[i as usize].clone() / (S::one() - sq)
}

/// How the general-`K` assignment reads its neighbor sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralKReading {
    /// Sums over the immediate closer neighbors, second λ term scaled by
    /// `|g-h|_1`, and the `μ` subtrahend using the distance from `h`.
    Printed,
    /// Sums over every histogram strictly closer to one end of the pair
    /// than the other, second λ term scaled by the graph distance from
    /// `g` to `h_hat`, and `μ_g = θ Σ_{h ~ g} λ(g | h, g)`. Reduces to the
    /// `K = 2` assignment inside the window.
    Halfspace,
}

/// Experimental general-`K` dual assignment. Pairs whose denominator
/// `1 + |C| θ² - K(K-1) θ² + θ |E|` is not positive get `λ = 0` and a note.
/// Multipliers with `|g - h_hat|_1 >= |g - h|_1` are zero.
pub fn build_generalk_certificate<S: Scalar>(
    n: u64,
    k: usize,
    theta: &S,
    prior: &MultinomialPrior<S>,
    reading: GeneralKReading,
    limits: &Limits,
) -> Result<DualCertificate<S>> {
    check_theta(theta)?;
    if k < 2 || prior.k() != k || prior.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "prior (n={}, K={}) vs certificate (n={n}, K={k})",
            prior.n(),
            prior.k()
        )));
    }
    let space = HistogramSpace::new(n, k, limits)?;
    let size = space.len();
    let mass: Vec<S> = (0..size)
        .map(|h| prior.mass_of_counts(space.counts(h)))
        .collect();
    let two = S::of_u64(2);
    let dg = |a: usize, b: usize| space.l1(a, b) / 2;
    let pow = |e: u64| theta.powu(e);

    // Denominator built from the neighbors of `hh` classified against `h`.
    let denom = |h: usize, hh: usize| -> S {
        let base = space.l1(h, hh);
        let (mut closer, mut equal) = (0u64, 0u64);
        for &x in space.neighbors(hh) {
            match space.l1(h, x).cmp(&base) {
                std::cmp::Ordering::Less => closer += 1,
                std::cmp::Ordering::Equal => equal += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
        let sq = theta.clone() * theta.clone();
        S::one() + S::of_u64(closer) * sq.clone() - S::of_u64((k * (k - 1)) as u64) * sq
            + theta.clone() * S::of_u64(equal)
    };
    // Points on the `h` side of the pair, weighted from `h`.
    let near_sum = |h: usize, hh: usize| -> S {
        let members: Vec<usize> = match reading {
            GeneralKReading::Printed => space
                .neighbors(hh)
                .iter()
                .copied()
                .filter(|&a| space.l1(h, a) < space.l1(h, hh))
                .collect(),
            GeneralKReading::Halfspace => (0..size)
                .filter(|&a| space.l1(a, h) < space.l1(a, hh))
                .collect(),
        };
        members.into_iter().fold(S::zero(), |acc, a| {
            acc + two.clone() * mass[a].clone() * pow(dg(a, h))
        })
    };
    // Points on the `hh` side, weighted from `hh` (or from `from`).
    let far_sum = |h: usize, hh: usize, from: usize| -> S {
        let members: Vec<usize> = match reading {
            GeneralKReading::Printed => space
                .neighbors(h)
                .iter()
                .copied()
                .filter(|&b| space.l1(hh, b) < space.l1(hh, h))
                .collect(),
            GeneralKReading::Halfspace => (0..size)
                .filter(|&b| space.l1(b, hh) < space.l1(b, h))
                .collect(),
        };
        members.into_iter().fold(S::zero(), |acc, b| {
            acc + two.clone() * mass[b].clone() * pow(dg(from, b))
        })
    };

    let mut cert = DualCertificate::zero(n, k, size);
    let mut fraction = BTreeMap::new();
    for (h, hh) in space.ordered_pairs() {
        let d = denom(h, hh);
        if d <= S::zero() {
            cert.notes.push(format!(
                "pair ({:?}, {:?}): denominator {} is not positive, multipliers set to 0",
                space.counts(h),
                space.counts(hh),
                d.render()
            ));
            continue;
        }
        let near = near_sum(h, hh);
        let frac = (near.clone() - theta.clone() * far_sum(h, hh, hh)) / d;
        fraction.insert((h, hh), frac.clone());
        for g in 0..size {
            if space.l1(g, hh) >= space.l1(g, h) {
                continue;
            }
            let scale = match reading {
                GeneralKReading::Printed => S::of_u64(space.l1(g, h)) * near.clone() / two.clone(),
                GeneralKReading::Halfspace => S::of_u64(dg(g, hh)) * near.clone(),
            };
            cert.set((g, h, hh), frac.clone() + scale);
        }
    }
    for g in 0..size {
        let mut acc = S::zero();
        for &h in space.neighbors(g) {
            match reading {
                GeneralKReading::Halfspace => {
                    if let Some(v) = fraction.get(&(h, g)) {
                        acc = acc + v.clone();
                    }
                }
                GeneralKReading::Printed => {
                    let d = denom(h, g);
                    if d > S::zero() {
                        acc = acc + (near_sum(h, g) - theta.clone() * far_sum(h, g, h)) / d;
                    }
                }
            }
        }
        cert.mu[g] = theta.clone() * acc;
    }
    Ok(cert)
}

/// Outcome of checking a primal table against a dual certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport<S> {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub primal_obj: S,
    pub dual_obj: S,
    pub gap: S,
    pub cs_violations: u64,
    pub primal_violations: u64,
    pub dual_violations: u64,
    /// The first few offending constraints of each kind.
    pub details: Vec<String>,
}

const MAX_DETAILS: usize = 20;

impl<S: Scalar> VerificationReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "primal_feasible": self.primal_feasible,
            "dual_feasible": self.dual_feasible,
            "primal_obj": self.primal_obj.to_json(),
            "dual_obj": self.dual_obj.to_json(),
            "gap": self.gap.to_json(),
            "cs_violations": self.cs_violations,
            "primal_violations": self.primal_violations,
            "dual_violations": self.dual_violations,
            "details": self.details,
        })
    }

    /// Both feasible, gap within `tol`, and no slackness violations.
    pub fn is_optimal_pair(&self, tol: &S) -> bool {
        self.primal_feasible
            && self.dual_feasible
            && self.cs_violations == 0
            && self.gap.abs() <= tol.clone()
    }
}

/// Checks primal feasibility, dual feasibility, the duality gap and
/// complementary slackness. Every comparison allows an absolute slack of
/// `tol`.
pub fn verify_certificate<S: Scalar>(
    primal: &KernelTable<S>,
    cert: &DualCertificate<S>,
    prior: &MultinomialPrior<S>,
    tol: &S,
) -> Result<VerificationReport<S>> {
    let space = primal.space();
    let size = space.len();
    if cert.mu.len() != size {
        return Err(Error::mismatch(cert.mu.len(), size));
    }
    if prior.n() != primal.n()
        || prior.k() != primal.k()
        || cert.n != primal.n()
        || cert.k != primal.k()
    {
        return Err(Error::DimensionMismatch(format!(
            "table (n={}, K={}), prior (n={}, K={}), certificate (n={}, K={})",
            primal.n(),
            primal.k(),
            prior.n(),
            prior.k(),
            cert.n,
            cert.k
        )));
    }
    let theta = primal.theta();
    let neg_tol = -tol.clone();
    let mut details = Vec::new();
    let note = |details: &mut Vec<String>, text: String| {
        if details.len() < MAX_DETAILS {
            details.push(text);
        }
    };

    let mut primal_violations = 0u64;
    let mut primal_obj = S::zero();
    for h in 0..size {
        let mass = prior.mass_of_counts(space.counts(h));
        for g in 0..size {
            let w = primal.prob(h, g);
            primal_obj = primal_obj + mass.clone() * w.clone() * S::of_u64(space.l1(h, g));
            if *w < neg_tol {
                primal_violations += 1;
                note(
                    &mut details,
                    format!("primal: W({g}|{h}) = {} < 0", w.render()),
                );
            }
        }
        let excess = (primal.row_sum(h) - S::one()).abs();
        if excess > tol.clone() {
            primal_violations += 1;
            note(
                &mut details,
                format!("primal: row {h} sums to 1 + {}", excess.render()),
            );
        }
    }
    let primal_slack = |g: usize, h: usize, hh: usize| {
        primal.prob(h, g).clone() - theta.clone() * primal.prob(hh, g).clone()
    };
    for (h, hh) in space.ordered_pairs() {
        for g in 0..size {
            if primal_slack(g, h, hh) < neg_tol {
                primal_violations += 1;
                note(
                    &mut details,
                    format!("primal: privacy row (g={g}, h={h}, h_hat={hh})"),
                );
            }
        }
    }

    let mut dual_violations = 0u64;
    for (key, v) in &cert.lambda {
        if *v < neg_tol {
            dual_violations += 1;
            note(
                &mut details,
                format!("dual: lambda{key:?} = {} < 0", v.render()),
            );
        }
    }
    let mut cs_violations = 0u64;
    for h in 0..size {
        let mass = prior.mass_of_counts(space.counts(h));
        for g in 0..size {
            let mut lhs = cert.mu[h].clone();
            for &nb in space.neighbors(h) {
                lhs = lhs + cert.lambda(g, h, nb) - theta.clone() * cert.lambda(g, nb, h);
            }
            let slack = mass.clone() * S::of_u64(space.l1(h, g)) - lhs;
            if slack < neg_tol {
                dual_violations += 1;
                note(
                    &mut details,
                    format!(
                        "dual: constraint (h={h}, g={g}) short by {}",
                        (-slack.clone()).render()
                    ),
                );
            } else if slack > tol.clone() && *primal.prob(h, g) > tol.clone() {
                cs_violations += 1;
                note(
                    &mut details,
                    format!(
                        "slackness: W({g}|{h}) > 0 but its dual constraint has slack {}",
                        slack.render()
                    ),
                );
            }
        }
    }
    for (&(g, h, hh), v) in &cert.lambda {
        if *v > tol.clone() && primal_slack(g, h, hh) > tol.clone() {
            cs_violations += 1;
            note(
                &mut details,
                format!("slackness: lambda({g}, {h}, {hh}) > 0 but its privacy row is slack"),
            );
        }
    }

    let dual_obj = cert.objective();
    Ok(VerificationReport {
        primal_feasible: primal_violations == 0,
        dual_feasible: dual_violations == 0,
        gap: primal_obj.clone() - dual_obj.clone(),
        primal_obj,
        dual_obj,
        cs_violations,
        primal_violations,
        dual_violations,
        details,
    })
}
