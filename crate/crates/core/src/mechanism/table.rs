use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::histogram::HistogramSpace;
use crate::numeric::Scalar;

/// A finite row-stochastic kernel `W(g|h)` on `H^n_K`, stored densely and
/// indexed by lexicographic histogram index.
#[derive(Clone, Debug)]
pub struct KernelTable<S> {
    space: Arc<HistogramSpace>,
    theta: S,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> KernelTable<S> {
    /// Checks shape, non-negativity and row sums.
    pub fn new(space: Arc<HistogramSpace>, theta: S, rows: Vec<Vec<S>>) -> Result<Self> {
        let size = space.len();
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch(format!(
                "kernel table must be {size}x{size}"
            )));
        }
        let table = KernelTable { space, theta, rows };
        if let Some((h, g)) = table.first_negative() {
            return Err(Error::InvalidParameter(format!(
                "negative probability at input {h}, output {g}"
            )));
        }
        if let Some(h) = table.first_unnormalised(&S::tol()) {
            return Err(Error::InvalidParameter(format!(
                "row {h} sums to {}",
                table.row_sum(h)
            )));
        }
        Ok(table)
    }

    /// The identity mechanism (no sanitisation).
    pub fn identity(space: Arc<HistogramSpace>, theta: S) -> Self {
        let size = space.len();
        let rows = (0..size)
            .map(|h| {
                (0..size)
                    .map(|g| if g == h { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        KernelTable { space, theta, rows }
    }

    /// Copy with one entry replaced. The result is not re-validated, which
    /// is the point: it is used to build deliberately broken tables.
    pub fn with_entry(&self, h: usize, g: usize, value: S) -> Self {
        let mut out = self.clone();
        out.rows[h][g] = value;
        out
    }

    pub fn space(&self) -> &Arc<HistogramSpace> {
        &self.space
    }

    pub fn n(&self) -> u64 {
        self.space.n()
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn theta(&self) -> &S {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `W(g|h)`.
    pub fn prob(&self, h: usize, g: usize) -> &S {
        &self.rows[h][g]
    }

    pub fn row(&self, h: usize) -> &[S] {
        &self.rows[h]
    }

    pub fn row_sum(&self, h: usize) -> S {
        self.rows[h].iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    fn first_negative(&self) -> Option<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .find_map(|(h, row)| row.iter().position(|x| *x < S::zero()).map(|g| (h, g)))
    }

    fn first_unnormalised(&self, tol: &S) -> Option<usize> {
        (0..self.rows.len()).find(|&h| !self.row_sum(h).approx_eq(&S::one(), tol))
    }

    /// True when every entry is non-negative and every row sums to one.
    pub fn is_stochastic(&self, tol: &S) -> bool {
        self.first_negative().is_none() && self.first_unnormalised(tol).is_none()
    }

    /// Outputs that receive positive mass from some input.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&g| self.rows.iter().any(|r| r[g] > S::zero()))
            .collect()
    }

    /// JSON dump with rows in lexicographic input order and only the
    /// positive outputs listed.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(h, row)| {
                let outputs: Vec<Value> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > S::zero())
                    .map(|(g, p)| json!({ "h": self.space.counts(g), "p": p.to_json() }))
                    .collect();
                json!({ "input": self.space.counts(h), "outputs": outputs })
            })
            .collect();
        json!({
            "n": self.n(),
            "k": self.k(),
            "theta": self.theta.to_json(),
            "rows": rows,
        })
    }

    /// Converts every entry to `f64`.
    pub fn to_f64(&self) -> KernelTable<f64> {
        KernelTable {
            space: self.space.clone(),
            theta: self.theta.to_f64_lossy(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(Scalar::to_f64_lossy).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Limits;

    fn space() -> Arc<HistogramSpace> {
        Arc::new(HistogramSpace::new(2, 2, &Limits::default()).unwrap())
    }

    #[test]
    fn validation() {
        let s = space();
        assert!(KernelTable::new(s.clone(), 0.5, vec![vec![1.0; 3]; 2]).is_err());
        let bad = vec![
            vec![1.5, -0.5, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!(KernelTable::new(s.clone(), 0.5, bad).is_err());
        let short = vec![
            vec![0.5, 0.4, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!(KernelTable::new(s.clone(), 0.5, short).is_err());
        let id = KernelTable::identity(s, 0.5);
        assert!(id.is_stochastic(&1e-12));
        assert_eq!(id.support(), vec![0, 1, 2]);
        assert!(!id.with_entry(0, 0, 0.0).is_stochastic(&1e-12));
    }

    #[test]
    fn json_lists_positive_outputs() {
        let id = KernelTable::identity(space(), 0.5);
        let v = id.to_json();
        assert_eq!(v["rows"][1]["input"], json!([1, 1]));
        assert_eq!(v["rows"][1]["outputs"], json!([{ "h": [1, 1], "p": 1.0 }]));
        assert_eq!(v["theta"], json!(0.5));
    }
}
