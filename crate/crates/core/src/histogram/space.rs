use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::point::Histogram;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::binomial;

/// `|H^n_K| = C(n+K-1, K-1)`.
pub fn histogram_count(n: u64, k: usize) -> BigUint {
    if k == 0 {
        return BigUint::from(0u32);
    }
    binomial(n + k as u64 - 1, k as u64 - 1)
}

/// Lexicographic enumeration of `H^n_K`.
pub fn enumerate_histograms(n: u64, k: usize, limits: &Limits) -> Result<HistogramIter> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let count = histogram_count(n, k);
    if count > BigUint::from(limits.enumeration) {
        return Err(Error::capacity(
            "histogram enumeration",
            format!("{count} histograms"),
            limits.enumeration,
        ));
    }
    let mut first = vec![0u64; k];
    first[k - 1] = n;
    Ok(HistogramIter {
        next: Some(first),
        remaining: count.to_u64().unwrap_or(u64::MAX),
    })
}

/// Single-pass iterator over `H^n_K` in lexicographic order.
#[derive(Debug)]
pub struct HistogramIter {
    next: Option<Vec<u64>>,
    remaining: u64,
}

impl Iterator for HistogramIter {
    type Item = Histogram;

    fn next(&mut self) -> Option<Histogram> {
        let current = self.next.take()?;
        self.next = successor(&current);
        self.remaining = self.remaining.saturating_sub(1);
        Some(Histogram::new(current).expect("K >= 1"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// Next composition in lexicographic order: bump the rightmost coordinate
/// that still has mass after it, then park the remainder in the last cell.
fn successor(c: &[u64]) -> Option<Vec<u64>> {
    let k = c.len();
    if k < 2 {
        return None;
    }
    let mut tail = c[k - 1];
    for i in (0..k - 1).rev() {
        if tail > 0 {
            let mut next = c.to_vec();
            next[i] += 1;
            for x in next.iter_mut().skip(i + 1) {
                *x = 0;
            }
            next[k - 1] = tail - 1;
            return Some(next);
        }
        tail += c[i];
    }
    None
}

/// `H^n_K` materialised with lexicographic indices and neighbor lists.
#[derive(Clone, Debug)]
pub struct HistogramSpace {
    n: u64,
    k: usize,
    points: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    neighbors: Vec<Vec<usize>>,
}

impl HistogramSpace {
    pub fn new(n: u64, k: usize, limits: &Limits) -> Result<Self> {
        let points: Vec<Vec<u64>> = enumerate_histograms(n, k, limits)?
            .map(|h| h.to_dense())
            .collect();
        let index: HashMap<Vec<u64>, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let neighbors = points
            .iter()
            .map(|p| {
                let mut out = Vec::new();
                for from in (0..k).filter(|&i| p[i] > 0) {
                    for to in (0..k).filter(|&j| j != from) {
                        let mut q = p.clone();
                        q[from] -= 1;
                        q[to] += 1;
                        out.push(index[&q]);
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        Ok(HistogramSpace {
            n,
            k,
            points,
            index,
            neighbors,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn counts(&self, idx: usize) -> &[u64] {
        &self.points[idx]
    }

    pub fn histogram(&self, idx: usize) -> Histogram {
        Histogram::new(self.points[idx].clone()).expect("K >= 1")
    }

    pub fn index_of(&self, counts: &[u64]) -> Option<usize> {
        self.index.get(counts).copied()
    }

    /// Lexicographic indices of the neighbors of `idx`, ascending.
    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.neighbors[idx]
    }

    pub fn l1(&self, a: usize, b: usize) -> u64 {
        self.points[a]
            .iter()
            .zip(&self.points[b])
            .map(|(x, y)| x.abs_diff(*y))
            .sum()
    }

    /// Ordered neighbor pairs `(h, h_hat)`, grouped by `h` ascending.
    pub fn ordered_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |h| self.neighbors[h].iter().map(move |&hh| (h, hh)))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successor_walks_lexicographically() {
        let all: Vec<Vec<u64>> = enumerate_histograms(2, 3, &Limits::default())
            .unwrap()
            .map(|h| h.to_dense())
            .collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
    }

    #[test]
    fn capacity_error() {
        let limits = Limits {
            enumeration: 20,
            ..Limits::default()
        };
        assert!(matches!(
            enumerate_histograms(5, 3, &limits),
            Err(Error::Capacity { .. })
        ));
        assert!(enumerate_histograms(4, 3, &limits).is_ok());
    }

    #[test]
    fn k_zero_rejected() {
        assert!(enumerate_histograms(3, 0, &Limits::default()).is_err());
    }

    #[test]
    fn space_neighbors_are_symmetric() {
        let space = HistogramSpace::new(4, 3, &Limits::default()).unwrap();
        for (a, b) in space.ordered_pairs() {
            assert!(space.neighbors(b).contains(&a));
            assert_eq!(space.l1(a, b), 2);
        }
    }
}
