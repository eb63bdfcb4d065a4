use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::binomial;

/// Which binomial-sum identity to use for the face count `N_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceCountVariant {
    /// Split coordinates into non-negative and strictly negative ones.
    PosNegSplit,
    /// Split off the zero coordinates first, then positive and negative.
    ZeroSplit,
    /// Coordination sequence of the `A_{K-1}` root lattice.
    RootLattice,
}

impl FaceCountVariant {
    pub const ALL: [FaceCountVariant; 3] = [
        FaceCountVariant::PosNegSplit,
        FaceCountVariant::ZeroSplit,
        FaceCountVariant::RootLattice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FaceCountVariant::PosNegSplit => "pos-neg-split",
            FaceCountVariant::ZeroSplit => "zero-split",
            FaceCountVariant::RootLattice => "root-lattice",
        }
    }
}

impl FromStr for FaceCountVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FaceCountVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown face-count variant `{s}`")))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// Exhaustive count of `{z in Z^K : sum z = 0, |z|_1 = 2d}` over the box
/// `|z_i| <= 2d` for the first `K-1` coordinates.
pub fn face_count_bruteforce(k: usize, d: u64, limits: &Limits) -> Result<u64> {
    check_k(k)?;
    if d == 0 {
        return Err(Error::InvalidParameter(
            "dilation d must be at least 1".into(),
        ));
    }
    let side = 4 * d + 1;
    let candidates = BigUint::from(side).pow((k - 1) as u32);
    if candidates > BigUint::from(limits.bruteforce) {
        return Err(Error::capacity(
            "brute-force face count",
            format!("{candidates} candidates"),
            limits.bruteforce,
        ));
    }
    let bound = 2 * d as i64;
    let target = 2 * d;
    let mut z = vec![-bound; k - 1];
    let mut count = 0u64;
    loop {
        let sum: i64 = z.iter().sum();
        let norm: u64 = z.iter().map(|x| x.unsigned_abs()).sum::<u64>() + sum.unsigned_abs();
        if norm == target {
            count += 1;
        }
        // odometer step
        let mut pos = 0;
        loop {
            if pos == z.len() {
                return Ok(count);
            }
            if z[pos] < bound {
                z[pos] += 1;
                break;
            }
            z[pos] = -bound;
            pos += 1;
        }
    }
}

/// `N_d` by one of the closed-form binomial sums. `N_0` is taken to be 1.
pub fn face_count_closed(k: usize, d: u64, variant: FaceCountVariant) -> Result<BigUint> {
    check_k(k)?;
    if d == 0 {
        return Ok(BigUint::one());
    }
    let kk = k as u64;
    let total = match variant {
        FaceCountVariant::PosNegSplit => (1..kk)
            .map(|r| binomial(kk, r) * binomial(d + r - 1, r - 1) * binomial(d - 1, kk - r - 1))
            .sum(),
        FaceCountVariant::ZeroSplit => {
            let mut acc = BigUint::zero();
            for z in 0..=kk - 2 {
                for p in 1..kk - z {
                    acc += binomial(kk, z)
                        * binomial(kk - z, p)
                        * binomial(d - 1, p - 1)
                        * binomial(d - 1, kk - z - p - 1);
                }
            }
            acc
        }
        FaceCountVariant::RootLattice => (0..kk)
            .map(|j| {
                let c = binomial(kk - 1, j);
                &c * &c * binomial(d + kk - j - 2, kk - 2)
            })
            .sum(),
    };
    Ok(total)
}

/// `N_d`, the number of lattice points on the boundary of the `d`-th dilation.
pub fn face_count(k: usize, d: u64) -> Result<BigUint> {
    face_count_closed(k, d, FaceCountVariant::RootLattice)
}

/// `L_P(d) = 1 + sum_{j<=d} N_j`, the lattice points of the `d`-th dilation.
pub fn dilate_count(k: usize, d: u64) -> Result<BigUint> {
    check_k(k)?;
    (1..=d).try_fold(BigUint::one(), |acc, j| Ok(acc + face_count(k, j)?))
}

/// `N_1..N_dmax` with their running totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCountTable {
    k: usize,
    face_counts: Vec<BigUint>,
    cumulative: Vec<BigUint>,
}

impl FaceCountTable {
    pub fn new(k: usize, d_max: u64) -> Result<Self> {
        check_k(k)?;
        let face_counts: Vec<BigUint> = (1..=d_max)
            .map(|d| face_count(k, d))
            .collect::<Result<_>>()?;
        let mut cumulative = Vec::with_capacity(face_counts.len() + 1);
        cumulative.push(BigUint::one());
        for n in &face_counts {
            let next = cumulative.last().expect("non-empty") + n;
            cumulative.push(next);
        }
        Ok(FaceCountTable {
            k,
            face_counts,
            cumulative,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_max(&self) -> u64 {
        self.face_counts.len() as u64
    }

    /// `N_d` for `1 <= d <= d_max`.
    pub fn face_count(&self, d: u64) -> Option<&BigUint> {
        d.checked_sub(1)
            .and_then(|i| self.face_counts.get(i as usize))
    }

    /// `L_P(d)` for `0 <= d <= d_max`.
    pub fn dilate_count(&self, d: u64) -> Option<&BigUint> {
        self.cumulative.get(d as usize)
    }

    /// CSV with columns `d,N_d,L_P(d)`; the `d = 0` row has `N_0 = 1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,N_d,L_P(d)\n");
        let _ = writeln!(out, "0,1,1");
        for (i, n) in self.face_counts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, n, self.cumulative[i + 1]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_k_and_zero_d() {
        let l = Limits::default();
        assert!(face_count_bruteforce(1, 3, &l).is_err());
        assert!(face_count_bruteforce(3, 0, &l).is_err());
        assert!(face_count_closed(1, 3, FaceCountVariant::ZeroSplit).is_err());
        assert!(dilate_count(1, 3).is_err());
    }

    #[test]
    fn bruteforce_cap() {
        let l = Limits {
            bruteforce: 100,
            ..Limits::default()
        };
        assert!(matches!(
            face_count_bruteforce(3, 3, &l),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn variant_names_roundtrip() {
        for v in FaceCountVariant::ALL {
            assert_eq!(v.name().parse::<FaceCountVariant>().unwrap(), v);
        }
        assert!("nope".parse::<FaceCountVariant>().is_err());
    }

    #[test]
    fn table_csv() {
        let t = FaceCountTable::new(3, 2).unwrap();
        assert_eq!(t.to_csv(), "d,N_d,L_P(d)\n0,1,1\n1,6,7\n2,12,19\n");
        assert_eq!(t.face_count(0), None);
        assert_eq!(t.dilate_count(2).unwrap(), &BigUint::from(19u32));
    }
}
