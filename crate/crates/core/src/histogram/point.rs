use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many cells a histogram is stored as `(index, count)` pairs.
pub const DENSE_K_THRESHOLD: usize = 1024;

#[derive(Clone, Debug)]
enum Cells {
    Dense(Vec<u64>),
    /// Non-zero cells only, sorted by index.
    Sparse(Vec<(usize, u64)>),
}

/// A point of the simplex lattice: `K` non-negative counts summing to `n`.
#[derive(Clone, Debug)]
pub struct Histogram {
    n: u64,
    k: usize,
    cells: Cells,
}

impl Histogram {
    /// Builds from a dense count vector, choosing the storage by `K`.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        Self::with_threshold(counts, DENSE_K_THRESHOLD)
    }

    pub fn with_threshold(counts: Vec<u64>, threshold: usize) -> Result<Self> {
        let k = counts.len();
        if k == 0 {
            return Err(Error::InvalidParameter("histogram needs K >= 1".into()));
        }
        let n = counts.iter().sum();
        let cells = if k > threshold {
            Cells::Sparse(
                counts
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c > 0)
                    .collect(),
            )
        } else {
            Cells::Dense(counts)
        };
        Ok(Histogram { n, k, cells })
    }

    /// Builds from `(index, count)` pairs; zero counts are dropped and
    /// repeated indices rejected.
    pub fn from_cells(k: usize, cells: Vec<(usize, u64)>) -> Result<Self> {
        Self::from_cells_with_threshold(k, cells, DENSE_K_THRESHOLD)
    }

    pub fn from_cells_with_threshold(
        k: usize,
        mut cells: Vec<(usize, u64)>,
        threshold: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("histogram needs K >= 1".into()));
        }
        cells.retain(|&(_, c)| c > 0);
        cells.sort_unstable_by_key(|&(i, _)| i);
        if let Some(&(i, _)) = cells.iter().find(|&&(i, _)| i >= k) {
            return Err(Error::InvalidParameter(format!(
                "cell index {i} outside 0..{k}"
            )));
        }
        if cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("repeated cell index".into()));
        }
        let n = cells.iter().map(|&(_, c)| c).sum();
        let cells = if k > threshold {
            Cells::Sparse(cells)
        } else {
            let mut dense = vec![0; k];
            for (i, c) in cells {
                dense[i] = c;
            }
            Cells::Dense(dense)
        };
        Ok(Histogram { n, k, cells })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        Self::from_cells(k, Vec::new())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.cells, Cells::Sparse(_))
    }

    pub fn get(&self, index: usize) -> u64 {
        match &self.cells {
            Cells::Dense(v) => v.get(index).copied().unwrap_or(0),
            Cells::Sparse(v) => v
                .binary_search_by_key(&index, |&(i, _)| i)
                .map(|pos| v[pos].1)
                .unwrap_or(0),
        }
    }

    /// Non-zero cells in index order.
    pub fn nonzero(&self) -> Box<dyn Iterator<Item = (usize, u64)> + '_> {
        match &self.cells {
            Cells::Dense(v) => Box::new(v.iter().copied().enumerate().filter(|&(_, c)| c > 0)),
            Cells::Sparse(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn to_dense(&self) -> Vec<u64> {
        match &self.cells {
            Cells::Dense(v) => v.clone(),
            Cells::Sparse(v) => {
                let mut dense = vec![0; self.k];
                for &(i, c) in v {
                    dense[i] = c;
                }
                dense
            }
        }
    }

    /// Dense counts, if stored densely.
    pub fn as_slice(&self) -> Option<&[u64]> {
        match &self.cells {
            Cells::Dense(v) => Some(v),
            Cells::Sparse(_) => None,
        }
    }

    /// Moves one record from cell `from` to cell `to`.
    pub fn moved(&self, from: usize, to: usize) -> Option<Histogram> {
        if from == to || to >= self.k || self.get(from) == 0 {
            return None;
        }
        let mut out = self.clone();
        match &mut out.cells {
            Cells::Dense(v) => {
                v[from] -= 1;
                v[to] += 1;
            }
            Cells::Sparse(v) => {
                let pos = v.binary_search_by_key(&from, |&(i, _)| i).ok()?;
                v[pos].1 -= 1;
                if v[pos].1 == 0 {
                    v.remove(pos);
                }
                match v.binary_search_by_key(&to, |&(i, _)| i) {
                    Ok(pos) => v[pos].1 += 1,
                    Err(pos) => v.insert(pos, (to, 1)),
                }
            }
        }
        Some(out)
    }

    pub fn to_extended(&self) -> ExtendedHistogram {
        ExtendedHistogram {
            n: self.n as i64,
            counts: self.to_dense().into_iter().map(|c| c as i64).collect(),
        }
    }
}

impl PartialEq for Histogram {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.nonzero().eq(other.nonzero())
    }
}

impl Eq for Histogram {}

impl Hash for Histogram {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        for cell in self.nonzero() {
            cell.hash(state);
        }
    }
}

impl Ord for Histogram {
    /// Lexicographic order of the count vectors.
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (self.as_slice(), other.as_slice()) {
            return a.cmp(b).then(self.k.cmp(&other.k));
        }
        let mut a = self.nonzero().peekable();
        let mut b = other.nonzero().peekable();
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (None, None) => return self.k.cmp(&other.k),
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ia, ca)), Some((ib, cb))) => match ia.cmp(&ib) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ca != cb {
                            return ca.cmp(&cb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for Histogram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sparse() {
            write!(f, "{{k={}", self.k)?;
            for (i, c) in self.nonzero() {
                write!(f, " {i}:{c}")?;
            }
            write!(f, "}}")
        } else {
            let parts: Vec<String> = self.to_dense().iter().map(u64::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// A point of the affine lattice `{x in Z^K : sum x = n}`; negative counts allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedHistogram {
    n: i64,
    counts: Vec<i64>,
}

impl ExtendedHistogram {
    pub fn new(counts: Vec<i64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter("histogram needs K >= 1".into()));
        }
        let n = counts.iter().sum();
        Ok(ExtendedHistogram { n, counts })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// The histogram this point equals, if it lies in the simplex.
    pub fn to_histogram(&self) -> Option<Histogram> {
        if self.counts.iter().any(|&c| c < 0) {
            return None;
        }
        Histogram::new(self.counts.iter().map(|&c| c as u64).collect()).ok()
    }

    /// Translates by an offset vector summing to zero.
    pub fn shifted(&self, offset: &[i64]) -> Result<Self> {
        if offset.len() != self.counts.len() {
            return Err(Error::mismatch(self.counts.len(), offset.len()));
        }
        let counts: Vec<i64> = self.counts.iter().zip(offset).map(|(a, b)| a + b).collect();
        ExtendedHistogram::new(counts)
    }
}

impl fmt::Display for ExtendedHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Common view over simplex and extended lattice points.
pub trait LatticePoint {
    fn dim(&self) -> usize;
    fn total(&self) -> i64;
    /// Non-zero coordinates in index order.
    fn entries(&self) -> Vec<(usize, i64)>;
}

impl LatticePoint for Histogram {
    fn dim(&self) -> usize {
        self.k
    }
    fn total(&self) -> i64 {
        self.n as i64
    }
    fn entries(&self) -> Vec<(usize, i64)> {
        self.nonzero().map(|(i, c)| (i, c as i64)).collect()
    }
}

impl LatticePoint for ExtendedHistogram {
    fn dim(&self) -> usize {
        self.counts.len()
    }
    fn total(&self) -> i64 {
        self.n
    }
    fn entries(&self) -> Vec<(usize, i64)> {
        self.counts
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .collect()
    }
}

fn check_compatible(a: &impl LatticePoint, b: &impl LatticePoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::mismatch(a.dim(), b.dim()));
    }
    if a.total() != b.total() {
        return Err(Error::DimensionMismatch(format!(
            "totals differ: {} vs {}",
            a.total(),
            b.total()
        )));
    }
    Ok(())
}

/// `sum |a_k - b_k|`; always even for points with equal totals.
pub fn l1_distance(a: &impl LatticePoint, b: &impl LatticePoint) -> Result<u64> {
    check_compatible(a, b)?;
    Ok(l1_unchecked(&a.entries(), &b.entries()))
}

fn l1_unchecked(a: &[(usize, i64)], b: &[(usize, i64)]) -> u64 {
    let (mut i, mut j, mut acc) = (0, 0, 0u64);
    while i < a.len() || j < b.len() {
        let ia = a.get(i).map_or(usize::MAX, |e| e.0);
        let ib = b.get(j).map_or(usize::MAX, |e| e.0);
        match ia.cmp(&ib) {
            Ordering::Less => {
                acc += a[i].1.unsigned_abs();
                i += 1;
            }
            Ordering::Greater => {
                acc += b[j].1.unsigned_abs();
                j += 1;
            }
            Ordering::Equal => {
                acc += (a[i].1 - b[j].1).unsigned_abs();
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Shortest-path length in the neighbor graph, i.e. half the L1 distance.
pub fn graph_distance(a: &Histogram, b: &Histogram) -> Result<u64> {
    l1_distance(a, b).map(|d| d / 2)
}

/// All histograms at L1 distance exactly 2, in lexicographic order.
pub fn neighbors(h: &Histogram) -> Vec<Histogram> {
    let sources: Vec<usize> = h.nonzero().map(|(i, _)| i).collect();
    let mut out: Vec<Histogram> = sources
        .iter()
        .flat_map(|&from| (0..h.k()).filter_map(move |to| h.moved(from, to)))
        .collect();
    out.sort();
    out
}

/// Neighbors of `center` split by how their distance to `reference`
/// compares with the distance from `center`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeighborClasses {
    pub farther: Vec<Histogram>,
    pub closer: Vec<Histogram>,
    pub equidistant: Vec<Histogram>,
}

pub fn classify_neighbors(reference: &Histogram, center: &Histogram) -> Result<NeighborClasses> {
    let base = l1_distance(reference, center)?;
    let mut classes = NeighborClasses::default();
    for nb in neighbors(center) {
        let d = l1_distance(reference, &nb)?;
        match d.cmp(&base) {
            Ordering::Greater => classes.farther.push(nb),
            Ordering::Less => classes.closer.push(nb),
            Ordering::Equal => classes.equidistant.push(nb),
        }
    }
    Ok(classes)
}
