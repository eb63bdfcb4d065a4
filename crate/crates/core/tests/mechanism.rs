use std::collections::HashMap;

use ehrhart_dp::ehrhart::{dstar_sform, DistanceLaw};
use ehrhart_dp::histogram::{ExtendedHistogram, Histogram, MultinomialPrior};
use ehrhart_dp::mechanism::*;
use ehrhart_dp::Limits;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn hist(v: &[u64]) -> Histogram {
    Histogram::new(v.to_vec()).unwrap()
}

fn ext(v: &[i64]) -> ExtendedHistogram {
    ExtendedHistogram::new(v.to_vec()).unwrap()
}

fn limits() -> Limits {
    Limits::default()
}

#[test]
fn kernel_examples() {
    let h = hist(&[3, 4]);
    let p = geometric_kernel_prob(2, &q(1, 2), &h.to_extended(), &h).unwrap();
    assert_eq!(p, q(1, 3));
    for (t, shift) in [(0.3, 1i64), (0.5, 3), (0.7, 6)] {
        let g = ext(&[3 + shift, 4 - shift]);
        let p = geometric_kernel_prob(2, &t, &g, &h).unwrap();
        let expected = t.powi(shift as i32) * (1.0 - t) / (1.0 + t);
        assert!((p - expected).abs() < 1e-15);
    }
    let h3 = hist(&[1, 1, 1]);
    let p = geometric_kernel_prob(3, &q(1, 2), &h3.to_extended(), &h3).unwrap();
    assert_eq!(p, q(1, 13));
    assert!(geometric_kernel_prob(3, &0.5, &ext(&[1, 2]), &h3).is_err());
    assert!(geometric_kernel_prob(3, &1.5, &h3.to_extended(), &h3).is_err());
}

#[test]
fn center_examples() {
    let p = MultinomialPrior::<f64>::uniform(2, 10).unwrap();
    assert_eq!(truncation_center(&p), hist(&[5, 5]));
    let p = MultinomialPrior::new(vec![q(1, 3), q(1, 3), q(1, 3)], 10).unwrap();
    let c = truncation_center(&p);
    assert_eq!(c.n(), 10);
    assert!(c.to_dense().iter().all(|&x| x == 3 || x == 4));
    let p = MultinomialPrior::new(vec![0.15, 0.25, 0.6], 7).unwrap();
    assert_eq!(truncation_center(&p), hist(&[1, 2, 4]));
}

/// `V ∘ U` computed by summing the geometric kernel over a wide strip of
/// the extended lattice and applying the truncation map point by point.
fn k2_oracle(n: u64, theta: f64, trunc: &TruncationSpec) -> Vec<Vec<f64>> {
    let c = (1.0 - theta) / (1.0 + theta);
    let reach = 200i64;
    (0..=n as i64)
        .map(|i| {
            let mut row = vec![0.0; n as usize + 1];
            for x in -reach..=n as i64 + reach {
                let g = ext(&[x, n as i64 - x]);
                let out = trunc.apply(&g).unwrap().get(0) as usize;
                row[out] += theta.powi((x - i).abs() as i32) * c;
            }
            row
        })
        .collect()
}

#[test]
fn interval_cascade_matches_lattice_sum() {
    for (n, lo, hi, t) in [
        (6, 1, 4, 0.5),
        (10, 0, 10, 0.3),
        (8, 3, 3, 0.7),
        (9, 2, 8, 0.8),
    ] {
        let trunc = TruncationSpec::interval(n, lo, hi).unwrap();
        let w = build_cascade_mechanism(n, 2, t, &trunc, &limits()).unwrap();
        let oracle = k2_oracle(n, t, &trunc);
        for i in 0..=n as usize {
            for j in 0..=n as usize {
                assert!(
                    (w.prob(i, j) - oracle[i][j]).abs() < 1e-12,
                    "n={n} i={i} j={j}"
                );
            }
        }
    }
}

#[test]
fn ball_cascade_matches_lattice_sum() {
    let t = 0.4;
    let n = 6u64;
    let prior = MultinomialPrior::<f64>::uniform(3, n).unwrap();
    let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
    let w = build_cascade_mechanism(n, 3, t, &trunc, &limits()).unwrap();
    let space = w.space().clone();
    let e = (1.0 + 4.0 * t + t * t) / (1.0 - t).powi(2);
    let reach = 40i64;
    for h in 0..space.len() {
        let hc: Vec<i64> = space.counts(h).iter().map(|&x| x as i64).collect();
        let mut row = vec![0.0; space.len()];
        for a in -reach..=reach {
            for b in -reach..=reach {
                let g = ext(&[hc[0] + a, hc[1] + b, hc[2] - a - b]);
                let dist: i64 = a.abs() + b.abs() + (a + b).abs();
                let out = trunc.apply(&g).unwrap();
                row[space.index_of(&out.to_dense()).unwrap()] += t.powi((dist / 2) as i32) / e;
            }
        }
        for g in 0..space.len() {
            assert!((w.prob(h, g) - row[g]).abs() < 1e-10, "h={h} g={g}");
        }
    }
}

#[test]
fn cascade_rows_and_center_mass() {
    let prior = MultinomialPrior::<f64>::uniform(3, 30).unwrap();
    let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
    let w = build_cascade_mechanism(30, 3, 0.5, &trunc, &limits()).unwrap();
    assert!(w.is_stochastic(&1e-12));
    let center = truncation_center(&prior);
    let c = w.space().index_of(&center.to_dense()).unwrap();
    for h in 0..w.len() {
        let u =
            geometric_kernel_prob(3, &0.5, &center.to_extended(), &w.space().histogram(h)).unwrap();
        assert!(*w.prob(h, c) >= u);
    }
}

#[test]
fn cascade_is_exact_in_rationals() {
    let prior = MultinomialPrior::new(vec![q(1, 3), q(1, 3), q(1, 3)], 6).unwrap();
    let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
    let w = build_cascade_mechanism(6, 3, q(1, 2), &trunc, &limits()).unwrap();
    for h in 0..w.len() {
        assert_eq!(w.row_sum(h), q(1, 1));
    }
    assert!(dp_check(&w, &q(0, 1)).passed);
}

#[test]
fn ball_outside_simplex_suggests_radius() {
    let prior = MultinomialPrior::new(vec![0.05, 0.95], 10).unwrap();
    match TruncationSpec::default_ball(&prior, 1.0) {
        Err(ehrhart_dp::Error::BallOutsideSimplex { max_feasible, .. }) => {
            assert_eq!(max_feasible, 3);
            let c = truncation_center(&prior);
            assert!(TruncationSpec::ball(c, max_feasible as f64).is_ok());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn first_stage_ignores_the_prior() {
    let a = MultinomialPrior::new(vec![0.3, 0.3, 0.4], 12).unwrap();
    let b = MultinomialPrior::new(vec![0.2, 0.4, 0.4], 12).unwrap();
    let ta = TruncationSpec::default_ball(&a, 1.0).unwrap();
    let tb = TruncationSpec::default_ball(&b, 1.0).unwrap();
    let wa = build_cascade_mechanism(12, 3, 0.5, &ta, &limits()).unwrap();
    let wb = build_cascade_mechanism(12, 3, 0.5, &tb, &limits()).unwrap();
    let (ca, cb) = (truncation_center(&a), truncation_center(&b));
    let space = wa.space();
    let mut shared = 0;
    for g in 0..space.len() {
        let gh = space.histogram(g);
        let inside = |t: &TruncationSpec, c: &Histogram| match t {
            TruncationSpec::Ball { radius, .. } => {
                gh != *c && space.l1(g, space.index_of(&c.to_dense()).unwrap()) as f64 <= *radius
            }
            _ => unreachable!(),
        };
        if inside(&ta, &ca) && inside(&tb, &cb) {
            for h in 0..space.len() {
                assert_eq!(wa.prob(h, g).to_bits(), wb.prob(h, g).to_bits());
            }
            shared += 1;
        }
    }
    assert!(shared > 0);
}

#[test]
fn k2_matches_fold_and_interval_cascade() {
    for (n, t, p) in [(20, 0.5, 0.5), (12, 0.3, 0.3), (30, 0.7, 0.4)] {
        let prior = MultinomialPrior::binary(p, n).unwrap();
        let (w, anchors) = build_k2_mechanism(t, &prior, &limits()).unwrap();
        assert!(w.is_stochastic(&1e-12));
        let (lo, hi) = anchors.window();
        let trunc = TruncationSpec::interval(n, lo, hi).unwrap();
        let cascade = build_cascade_mechanism(n, 2, t, &trunc, &limits()).unwrap();
        let oracle = k2_oracle(n, t, &trunc);
        for i in 0..=n as usize {
            for j in 0..=n as usize {
                assert!((w.prob(i, j) - cascade.prob(i, j)).abs() < 1e-14);
                assert!((w.prob(i, j) - oracle[i][j]).abs() < 1e-12);
            }
        }
        assert!(dp_check(&w, &1e-12).passed);
    }
}

#[test]
fn k2_exact_rows() {
    let prior = MultinomialPrior::binary(q(1, 2), 20).unwrap();
    let (w, _) = build_k2_mechanism(q(1, 2), &prior, &limits()).unwrap();
    for h in 0..w.len() {
        assert_eq!(w.row_sum(h), q(1, 1));
    }
    assert!(dp_check(&w, &q(0, 1)).passed);
}

#[test]
fn fold_ratios() {
    // Left of the left anchor the ratio is strictly inside (θ, 1/θ); at the
    // anchor itself the constraint is tight.
    for (n, t, p) in [(20, 5, 5), (40, 3, 3), (30, 7, 5)] {
        let prior = MultinomialPrior::binary(q(p, 10), n).unwrap();
        let theta = q(t, 10);
        let (w, a) = build_k2_mechanism(theta.clone(), &prior, &limits()).unwrap();
        let fold = (a.left_anchor - 1) as usize;
        for i in 1..=fold {
            let r = w.prob(i, fold) / w.prob(i - 1, fold);
            assert!(r > theta && r < q(1, 1) / &theta, "i={i}");
        }
        let at = a.left_anchor as usize;
        assert_eq!(w.prob(at, fold) / w.prob(at - 1, fold), theta);
        let right = (a.right_anchor + 1) as usize;
        for i in right..n as usize {
            let r = w.prob(i, right) / w.prob(i + 1, right);
            assert!(r > theta && r < q(1, 1) / &theta, "i={i}");
        }
    }
}

/// Anchors by their definition, with the geometric sums written out.
fn anchors_oracle(w: &[f64], t: f64) -> (i64, i64) {
    let n = w.len() as i64 - 1;
    let f = |i: i64| -> f64 {
        (0..=i)
            .map(|k| 2.0 * w[k as usize] * t.powi((i - k) as i32))
            .sum()
    };
    let b = |i: i64| -> f64 {
        (i..=n)
            .map(|k| 2.0 * w[k as usize] * t.powi((k - i) as i32))
            .sum()
    };
    let a = (0..=n + 1)
        .find(|&i| (i..=n).all(|k| f(k - 1) - t * b(k) >= 0.0))
        .unwrap();
    let bb = (-1..=n)
        .rev()
        .find(|&i| (0..=i).all(|k| b(k + 1) - t * f(k) >= 0.0))
        .unwrap();
    (a, bb)
}

#[test]
fn anchor_examples() {
    let n = 10;
    let uniform = vec![1.0 / (n as f64 + 1.0); n + 1];
    let a = compute_anchors(&uniform, &0.5).unwrap();
    assert!(a.left_anchor <= 2);
    assert_eq!(
        (a.left_anchor, a.right_anchor),
        anchors_oracle(&uniform, 0.5)
    );

    let prior = MultinomialPrior::binary(0.5, 40).unwrap();
    let w = binomial_weights(&prior).unwrap();
    let a = compute_anchors(&w, &0.5).unwrap();
    assert!(a.left_anchor < 20 && 20 < a.right_anchor);
    assert_eq!((a.left_anchor, a.right_anchor), anchors_oracle(&w, 0.5));
    // Skewed small instance: the right scan fails at 0, collapsing onto 0.
    let prior = MultinomialPrior::binary(0.15, 2).unwrap();
    let skew = binomial_weights(&prior).unwrap();
    let s = compute_anchors(&skew, &0.7).unwrap();
    assert_eq!((s.left_anchor, s.right_anchor), (1, -1));
    assert_eq!((s.left_anchor, s.right_anchor), anchors_oracle(&skew, 0.7));
    for i in 0..=40usize {
        let prev = if i == 0 { 0.0 } else { a.forward[i - 1] };
        let next = if i == 40 { 0.0 } else { a.backward[i + 1] };
        assert!((a.forward[i] - (0.5 * prev + 2.0 * w[i])).abs() < 1e-15);
        assert!((a.backward[i] - (0.5 * next + 2.0 * w[i])).abs() < 1e-15);
    }
}

#[test]
fn dp_check_examples() {
    let trunc = TruncationSpec::interval(12, 2, 9).unwrap();
    let u = build_cascade_mechanism(12, 2, 0.5, &trunc, &limits()).unwrap();
    let r = dp_check(&u, &1e-12);
    assert!(r.passed && r.violation.is_none());
    assert!((r.worst_ratio - 0.5).abs() < 1e-12);
    assert_eq!(r.checked, 2 * 12 * 8);

    let prior = MultinomialPrior::binary(0.5, 10).unwrap();
    let (w, a) = build_k2_mechanism(0.5, &prior, &limits()).unwrap();
    let j = a.left_anchor as usize + 1;
    let broken = w.with_entry(j, j, 0.0);
    let r = dp_check(&broken, &1e-12);
    assert!(!r.passed);
    assert_eq!(r.worst_ratio, 0.0);
    let v = r.violation.unwrap();
    assert_eq!(v.hhat, vec![j as u64, 10 - j as u64]);
    assert_eq!(v.g, v.hhat);
    assert_eq!(v.h[0].abs_diff(j as u64), 1);

    let json = serde_json::to_value(dp_check(&w, &1e-12)).unwrap();
    assert_eq!(json["violation"], serde_json::Value::Null);
    for key in ["passed", "worst_ratio", "checked"] {
        assert!(json.get(key).is_some());
    }
}

#[test]
fn dp_one_sided_outputs_fail() {
    // Identity on n = 1: each output is reachable from one input only.
    let space =
        std::sync::Arc::new(ehrhart_dp::histogram::HistogramSpace::new(1, 2, &limits()).unwrap());
    let id = KernelTable::identity(space, 0.5);
    let r = dp_check(&id, &1e-12);
    assert!(!r.passed);
    let trunc = TruncationSpec::interval(5, 2, 2).unwrap();
    let constant = build_cascade_mechanism(5, 2, 0.5, &trunc, &limits()).unwrap();
    let r = dp_check(&constant, &0.0);
    assert!(r.passed);
    assert_eq!(r.worst_ratio, 1.0);
}

#[test]
fn distortion_examples() {
    let prior = MultinomialPrior::binary(q(1, 2), 1).unwrap();
    let space =
        std::sync::Arc::new(ehrhart_dp::histogram::HistogramSpace::new(1, 2, &limits()).unwrap());
    let id = KernelTable::identity(space, q(1, 2));
    assert_eq!(expected_distortion(&id, &prior).unwrap(), q(0, 1));

    // Fold to {0,1}: each row keeps 2/3 and moves 1/3 across distance 2.
    let trunc = TruncationSpec::interval(1, 0, 1).unwrap();
    let w = build_cascade_mechanism(1, 2, q(1, 2), &trunc, &limits()).unwrap();
    assert_eq!(*w.prob(0, 0), q(2, 3));
    assert_eq!(expected_distortion(&w, &prior).unwrap(), q(2, 3));

    let prior = MultinomialPrior::binary(0.5, 40).unwrap();
    let (w, _) = build_k2_mechanism(0.5, &prior, &limits()).unwrap();
    let d = expected_distortion(&w, &prior).unwrap();
    assert!((d - 8.0 / 3.0).abs() < 0.15, "{d}");

    let wrong = MultinomialPrior::binary(0.5, 41).unwrap();
    assert!(expected_distortion(&w, &wrong).is_err());
}

#[test]
fn heavy_set_bound() {
    let prior = MultinomialPrior::binary(0.5, 40).unwrap();
    let (w, _) = build_k2_mechanism(0.5, &prior, &limits()).unwrap();
    let full = expected_distortion(&w, &prior).unwrap();
    let heavy = expected_distortion_heavy(&w, &prior, &1e-6).unwrap();
    assert!(heavy.inputs_used < w.len());
    assert!(heavy.value <= full && full - heavy.value <= heavy.bound + 1e-12);
    let all = expected_distortion_heavy(&w, &prior, &0.0).unwrap();
    assert_eq!(all.neglected_mass, 0.0);
    assert!((all.value - full).abs() < 1e-12);
}

#[test]
fn geometric_distortion_examples() {
    assert_eq!(geometric_distortion_closed(2, &q(1, 2)).unwrap(), q(8, 3));
    assert_eq!(geometric_distortion_closed(3, &q(1, 2)).unwrap(), q(72, 13));
    for k in 2..=6 {
        for t in [q(1, 10), q(3, 10), q(1, 2), q(7, 10), q(9, 10)] {
            assert_eq!(
                geometric_distortion_closed(k, &t).unwrap(),
                dstar_sform(k, &t).unwrap()
            );
        }
        let mut prev = f64::INFINITY;
        for e in 1..20 {
            let t = 0.5f64.powi(e);
            let d = geometric_distortion_closed(k, &t).unwrap();
            assert!(d < prev && d > 0.0);
            prev = d;
        }
        assert!(prev < 1e-2);
    }
    let s = geometric_distortion_series(3, 0.5, 1e-14, 1_000_000).unwrap();
    assert!((s - 72.0 / 13.0).abs() < 1e-10);
}

#[test]
fn cascade_against_geometric_stage() {
    // Inputs within half the radius of the center cannot do worse than
    // under the geometric kernel alone; the rest contribute at most 2n each.
    let mut strict_failures = Vec::new();
    for n in 4..=40u64 {
        for t in [0.3, 0.5, 0.7] {
            let prior = MultinomialPrior::binary(0.5, n).unwrap();
            let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
            let w = build_cascade_mechanism(n, 2, t, &trunc, &limits()).unwrap();
            let d = expected_distortion(&w, &prior).unwrap();
            let g = geometric_distortion_closed(2, &t).unwrap();
            let TruncationSpec::Ball { center, radius } = &trunc else {
                unreachable!()
            };
            let c = w.space().index_of(&center.to_dense()).unwrap();
            let far_mass: f64 = (0..w.len())
                .filter(|&h| w.space().l1(h, c) as f64 > radius / 2.0)
                .map(|h| prior.mass_of_counts(w.space().counts(h)))
                .sum();
            assert!(d <= g + 2.0 * n as f64 * far_mass + 1e-9, "n={n} θ={t}");
            if d > g + 1e-9 {
                strict_failures.push((n, t));
            }
        }
    }
    println!("cascade distortion above the geometric stage at (n, θ): {strict_failures:?}");
}

#[test]
fn row_stochastic_and_private_on_grid() {
    for t in [0.3, 0.5, 0.7] {
        for n in 4..=40u64 {
            let prior = MultinomialPrior::binary(0.5, n).unwrap();
            let (w, _) = build_k2_mechanism(t, &prior, &limits()).unwrap();
            assert!(
                w.is_stochastic(&1e-12) && dp_check(&w, &1e-12).passed,
                "k2 n={n} θ={t}"
            );
            let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
            let c = build_cascade_mechanism(n, 2, t, &trunc, &limits()).unwrap();
            assert!(c.is_stochastic(&1e-12) && dp_check(&c, &1e-12).passed);

            let prior3 = MultinomialPrior::<f64>::uniform(3, n).unwrap();
            let trunc3 = TruncationSpec::default_ball(&prior3, 1.0).unwrap();
            let c3 = build_cascade_mechanism(n, 3, t, &trunc3, &limits()).unwrap();
            assert!(c3.is_stochastic(&1e-12), "K=3 n={n}");
            assert!(dp_check(&c3, &1e-12).passed, "K=3 n={n} θ={t}");
        }
    }
}

#[test]
fn k2_distortion_trend() {
    let prior = |n| MultinomialPrior::binary(0.5, n).unwrap();
    let values: Vec<f64> = [10u64, 20, 40, 60]
        .iter()
        .map(|&n| {
            let (w, _) = build_k2_mechanism(0.5, &prior(n), &limits()).unwrap();
            expected_distortion(&w, &prior(n)).unwrap()
        })
        .collect();
    let monotone = values.windows(2).all(|p| p[1] <= p[0]);
    // Not a theorem; printed for the record.
    println!("k2 distortion at n=10,20,40,60: {values:?} non-increasing={monotone}");
    assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn mechanism_json_shapes() {
    let prior = MultinomialPrior::binary(q(1, 2), 3).unwrap();
    let (w, _) = build_k2_mechanism(q(1, 2), &prior, &limits()).unwrap();
    let v = w.to_json();
    assert_eq!(v["n"], 3);
    assert_eq!(v["k"], 2);
    assert_eq!(v["theta"], "1/2");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(v["rows"][0]["outputs"][0]["p"].is_string());
    let f = w.to_f64().to_json();
    assert!(f["rows"][0]["outputs"][0]["p"].is_f64());
    assert_eq!(f["rows"][2]["input"], serde_json::json!([2, 1]));
}

fn chi_square_pass(observed: &[u64], expected: &[f64], alpha: f64) -> (bool, f64, f64) {
    // Pool cells with small expectation into one bin.
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(expected) {
        if *e < 5.0 {
            pool_o += *o as f64;
            pool_e += e;
        } else {
            stat += (*o as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e.max(1e-300);
        bins += 1;
    }
    let crit = ChiSquared::new((bins - 1) as f64)
        .unwrap()
        .inverse_cdf(1.0 - alpha);
    (stat <= crit, stat, crit)
}

#[test]
fn sampler_matches_cascade_row() {
    let n = 12;
    let prior = MultinomialPrior::<f64>::uniform(3, n).unwrap();
    let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
    let table = build_cascade_mechanism(n, 3, 0.5, &trunc, &limits()).unwrap();
    let sanitizer = Sanitizer::new(3, 0.5, trunc, 100_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let space = table.space();
    for input in [hist(&[4, 4, 4]), hist(&[0, 2, 10])] {
        let h = space.index_of(&input.to_dense()).unwrap();
        let draws = 40_000u64;
        let mut counts = vec![0u64; space.len()];
        for _ in 0..draws {
            let out = sanitizer.sample(&input, &mut rng).unwrap();
            assert_eq!(out.n(), n);
            counts[space.index_of(&out.to_dense()).unwrap()] += 1;
        }
        let expected: Vec<f64> = table.row(h).iter().map(|p| p * draws as f64).collect();
        let (ok, stat, crit) = chi_square_pass(&counts, &expected, 0.001);
        assert!(ok, "input {input}: χ²={stat} > {crit}");
    }
}

#[test]
fn sampler_distance_law() {
    let law = DistanceLaw::new(3, 0.5, 100_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 100_000u64;
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for _ in 0..draws {
        *freq.entry(law.sample(&mut rng)).or_default() += 1;
    }
    let top = *freq.keys().max().unwrap() as usize;
    let observed: Vec<u64> = (0..=top + 5)
        .map(|d| freq.get(&(d as u64)).copied().unwrap_or(0))
        .collect();
    let mut expected: Vec<f64> = (0..=top + 5)
        .map(|d| law.probability(d as u64) * draws as f64)
        .collect();
    let tail: f64 = 1.0 - expected.iter().sum::<f64>() / draws as f64;
    *expected.last_mut().unwrap() += tail.max(0.0) * draws as f64;
    let (ok, stat, crit) = chi_square_pass(&observed, &expected, 0.001);
    assert!(ok, "χ²={stat} > {crit}");
}

#[test]
fn tiny_theta_rarely_moves() {
    let prior = MultinomialPrior::<f64>::uniform(3, 9).unwrap();
    let trunc = TruncationSpec::default_ball(&prior, 1.0).unwrap();
    let sanitizer = Sanitizer::new(3, 1e-6, trunc.clone(), 1000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = hist(&[3, 3, 3]);
    let same = (0..10_000)
        .filter(|_| sanitizer.sample(&h, &mut rng).unwrap() == h)
        .count();
    assert!(same as f64 / 10_000.0 >= 0.999);
    assert!(sample_sanitized(&hist(&[1, 1]), 0.5, &trunc, &mut rng).is_err());
}

proptest! {
    #[test]
    fn interval_cascades_are_private(n in 1u64..25, a in 0u64..25, b in 0u64..25, t in 0.05f64..0.95) {
        let (lo, hi) = (a.min(b).min(n), a.max(b).min(n));
        let trunc = TruncationSpec::interval(n, lo, hi).unwrap();
        let w = build_cascade_mechanism(n, 2, t, &trunc, &Limits::default()).unwrap();
        prop_assert!(w.is_stochastic(&1e-12));
        prop_assert!(dp_check(&w, &1e-12).passed);
    }

    #[test]
    fn k2_mechanisms_are_private(n in 4u64..40, p in 0.1f64..0.9, t in 0.1f64..0.9) {
        let prior = MultinomialPrior::binary(p, n).unwrap();
        let (w, a) = build_k2_mechanism(t, &prior, &Limits::default()).unwrap();
        prop_assert!(a.left_anchor <= a.right_anchor + 2);
        prop_assert!(w.is_stochastic(&1e-12));
        prop_assert!(dp_check(&w, &1e-12).passed);
    }

    #[test]
    fn center_is_close_to_mean(raw in prop::collection::vec(1u32..100, 2..6), n in 0u64..200) {
        let total: u32 = raw.iter().sum();
        let p: Vec<BigRational> = raw.iter().map(|&x| q(x as i64, total as i64)).collect();
        let k = p.len();
        let prior = MultinomialPrior::new(p.clone(), n).unwrap();
        let c = truncation_center(&prior);
        prop_assert_eq!(c.n(), n);
        let gap = c.to_dense().iter().zip(&p).fold(q(0, 1), |acc, (&ci, pi)| {
            let diff = q(ci as i64, 1) - pi * q(n as i64, 1);
            acc + if diff < q(0, 1) { -diff } else { diff }
        });
        prop_assert!(gap < q(k as i64, 1));
    }
}
