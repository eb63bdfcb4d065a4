use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::{binomial, Scalar};

use super::series::{check_theta, distance_probability};

/// Parts of a uniformly random composition of `total` into `parts`
/// non-negative pieces (stars and bars).
fn weak_composition<R: Rng + ?Sized>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    if parts == 1 {
        return vec![total];
    }
    let slots = total as usize + parts - 1;
    let mut bars = index::sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev: i64 = -1;
    for b in bars {
        out.push((b as i64 - prev - 1) as u64);
        prev = b as i64;
    }
    out.push((slots as i64 - prev - 1) as u64);
    out
}

/// Uniformly random composition of `total` into `parts` positive pieces.
fn strict_composition<R: Rng + ?Sized>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    weak_composition(rng, total - parts as u64, parts)
        .into_iter()
        .map(|x| x + 1)
        .collect()
}

/// Uniform draw from `{z in Z^K : sum z = 0, |z|_1 = 2d}`.
///
/// The split into non-negative and negative coordinates is chosen with
/// probability proportional to its number of points, then the two
/// compositions are drawn uniformly.
pub fn sample_face_point<R: Rng + ?Sized>(k: usize, d: u64, rng: &mut R) -> Result<Vec<i64>> {
    if k < 2 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "face sampling needs K >= 2 and d >= 1, got K={k}, d={d}"
        )));
    }
    let kk = k as u64;
    let weights: Vec<f64> = (1..kk)
        .map(|r| {
            f64::from_biguint(
                &(binomial(kk, r) * binomial(d + r - 1, r - 1) * binomial(d - 1, kk - r - 1)),
            )
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut r = weights.len();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            r = i + 1;
            break;
        }
        u -= w;
    }
    while weights[r - 1] == 0.0 {
        r -= 1;
    }
    let chosen = index::sample(rng, k, r).into_vec();
    let mut is_pos = vec![false; k];
    for &c in &chosen {
        is_pos[c] = true;
    }
    let pos = weak_composition(rng, d, r);
    let neg = strict_composition(rng, d, k - r);
    let (mut pi, mut ni) = (pos.into_iter(), neg.into_iter());
    Ok(is_pos
        .into_iter()
        .map(|p| {
            if p {
                pi.next().expect("sized") as i64
            } else {
                -(ni.next().expect("sized") as i64)
            }
        })
        .collect())
}

/// Law of the graph distance of one geometric-kernel step:
/// `d` with probability `N_d θ^d / E(θ)`.
#[derive(Clone, Debug)]
pub struct DistanceLaw {
    cdf: Vec<f64>,
}

impl DistanceLaw {
    /// Tabulates the law until the terms are decreasing and below `1e-18`.
    pub fn new(k: usize, theta: f64, max_terms: u64) -> Result<Self> {
        check_theta(&theta)?;
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut prev = f64::INFINITY;
        for d in 0..max_terms {
            let p = distance_probability(k, &theta, d)?;
            acc += p;
            cdf.push(acc);
            if p < 1e-18 && p < prev {
                return Ok(DistanceLaw { cdf });
            }
            prev = p;
        }
        Err(Error::InvalidParameter(format!(
            "distance law needs more than {max_terms} terms"
        )))
    }

    pub fn probability(&self, d: u64) -> f64 {
        let d = d as usize;
        match d {
            0 => self.cdf.first().copied().unwrap_or(0.0),
            _ if d < self.cdf.len() => self.cdf[d] - self.cdf[d - 1],
            _ => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1) as u64
    }
}
