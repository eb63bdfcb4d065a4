use rand::Rng;

use crate::ehrhart::{sample_face_point, DistanceLaw};
use crate::error::{Error, Result};
use crate::histogram::Histogram;

use super::cascade::TruncationSpec;

/// Draws from the cascade without materialising its table: a geometric
/// step on the extended lattice followed by the truncation map.
#[derive(Clone, Debug)]
pub struct Sanitizer {
    k: usize,
    theta: f64,
    law: DistanceLaw,
    trunc: TruncationSpec,
}

impl Sanitizer {
    pub fn new(k: usize, theta: f64, trunc: TruncationSpec, max_terms: u64) -> Result<Self> {
        let law = DistanceLaw::new(k, theta, max_terms)?;
        Ok(Sanitizer {
            k,
            theta,
            law,
            trunc,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.trunc
    }

    pub fn sample<R: Rng + ?Sized>(&self, h: &Histogram, rng: &mut R) -> Result<Histogram> {
        if h.k() != self.k {
            return Err(Error::mismatch(self.k, h.k()));
        }
        let d = self.law.sample(rng);
        let base = h.to_extended();
        let moved = if d == 0 {
            base
        } else {
            base.shifted(&sample_face_point(self.k, d, rng)?)?
        };
        self.trunc.apply(&moved)
    }
}

/// One-shot convenience wrapper around [`Sanitizer`].
pub fn sample_sanitized<R: Rng + ?Sized>(
    h: &Histogram,
    theta: f64,
    trunc: &TruncationSpec,
    rng: &mut R,
) -> Result<Histogram> {
    Sanitizer::new(h.k(), theta, trunc.clone(), 1_000_000)?.sample(h, rng)
}
