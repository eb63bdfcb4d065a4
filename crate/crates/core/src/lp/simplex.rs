use serde::Serialize;

use crate::numeric::{Mode, Scalar};

use super::program::{Bound, LinearProgram, Relation, Sense};

pub const MAX_PIVOTS: u64 = 1_000_000;

/// Consecutive degenerate pivots tolerated before Bland's rule takes over.
pub const DEGENERATE_RUN: u32 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<S> {
    pub status: Status,
    /// Objective in the program's own sense; `None` unless optimal.
    pub objective: Option<S>,
    /// Values of the program's variables (empty unless optimal).
    pub solution: Vec<S>,
    pub pivots: u64,
    pub mode: Mode,
}

/// Column layout of the standard-form tableau.
struct Layout {
    /// For each program variable, its positive column and, if free, the
    /// column of its negative part.
    columns: Vec<(usize, Option<usize>)>,
    structural: usize,
    artificial_start: usize,
    width: usize,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    cost: Vec<S>,
    value: S,
    tol: S,
    /// Entries this small are flushed to zero after a pivot (floats only).
    drop: S,
    pivots: u64,
}

enum Outcome {
    Optimal,
    Unbounded,
    Limit,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = S::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() * inv;
        self.rows[r][c] = S::one();
        let support: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, _)| j)
            .collect();
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &support {
                let v = row[j].clone() - factor.clone() * pivot_row[j].clone();
                row[j] = if v.abs() <= self.drop { S::zero() } else { v };
            }
            row[c] = S::zero();
            let v = self.rhs[i].clone() - factor * pivot_rhs.clone();
            self.rhs[i] = if v.abs() <= self.drop { S::zero() } else { v };
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for &j in &support {
                self.cost[j] = self.cost[j].clone() - factor.clone() * pivot_row[j].clone();
            }
            self.cost[c] = S::zero();
            self.value = self.value.clone() - factor * pivot_rhs;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn clamped_rhs(&self, i: usize) -> S {
        if self.rhs[i] < S::zero() {
            S::zero()
        } else {
            self.rhs[i].clone()
        }
    }

    /// Minimum ratio, ties broken by the lowest basic index.
    fn ratio_exact(&self, c: usize) -> Option<(S, usize)> {
        let mut best: Option<(S, usize)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if *a <= self.tol {
                continue;
            }
            let ratio = self.clamped_rhs(i) / a.clone();
            let better = match &best {
                None => true,
                Some((b, bi)) => ratio < *b || (ratio == *b && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((ratio, i));
            }
        }
        best
    }

    /// Two-pass ratio test: among rows whose ratio is within the tolerance
    /// of the minimum, take the largest pivot element.
    fn ratio_harris(&self, c: usize) -> Option<(S, usize)> {
        let mut bound: Option<S> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if *a <= self.tol {
                continue;
            }
            let relaxed = (self.clamped_rhs(i) + self.tol.clone()) / a.clone();
            if bound.as_ref().is_none_or(|b| relaxed < *b) {
                bound = Some(relaxed);
            }
        }
        let bound = bound?;
        let mut best: Option<(S, usize)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if *a <= self.tol {
                continue;
            }
            let ratio = self.clamped_rhs(i) / a.clone();
            if ratio > bound {
                continue;
            }
            if best.as_ref().is_none_or(|(_, bi)| *a > self.rows[*bi][c]) {
                best = Some((ratio, i));
            }
        }
        best
    }

    /// Dantzig pricing (most negative reduced cost, lowest index on ties)
    /// with the two-pass ratio test while pivots make progress. After
    /// [`DEGENERATE_RUN`] consecutive degenerate pivots it switches to
    /// Bland's rule (lowest-index improving column, exact ratio ties broken
    /// by the lowest basic index) until the objective moves again, which
    /// rules out cycling. Rational mode always uses Bland's rule.
    fn run(&mut self, allowed: usize) -> Outcome {
        let neg_tol = -self.tol.clone();
        let mut stalled = 0u32;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Outcome::Limit;
            }
            let bland = stalled >= DEGENERATE_RUN || S::MODE == Mode::Rational;
            let entering = if bland {
                (0..allowed).find(|&j| self.cost[j] < neg_tol)
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if self.cost[j] < neg_tol && best.is_none_or(|b| self.cost[j] < self.cost[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let best = if bland {
                self.ratio_exact(c)
            } else {
                self.ratio_harris(c)
            };
            match best {
                None => return Outcome::Unbounded,
                Some((ratio, r)) => {
                    if ratio <= self.tol {
                        stalled = stalled.saturating_add(1);
                    } else {
                        stalled = 0;
                    }
                    self.pivot(r, c);
                }
            }
        }
    }
}

fn layout<S: Scalar>(lp: &LinearProgram<S>) -> Layout {
    let mut next = 0;
    let columns = lp
        .bounds()
        .iter()
        .map(|b| {
            let pos = next;
            next += 1;
            let neg = (*b == Bound::Free).then(|| {
                next += 1;
                next - 1
            });
            (pos, neg)
        })
        .collect();
    let structural = next;
    let slacks = lp
        .constraints()
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    Layout {
        columns,
        structural,
        artificial_start: structural + slacks,
        width: 0,
    }
}

/// Two-phase primal simplex on a dense tableau.
///
/// In float mode the zero right-hand sides of `<=` rows are first relaxed by
/// distinct amounts near `1e-7`, which breaks the heavy degeneracy of the
/// privacy rows. The final basis is then re-evaluated at the true
/// right-hand side; if that leaves it infeasible the unperturbed problem is
/// solved from scratch. Rational mode never perturbs.
pub fn solve_simplex<S: Scalar>(lp: &LinearProgram<S>) -> SolveReport<S> {
    if S::MODE == Mode::Float {
        if let Some(report) = solve_with(lp, true) {
            return report;
        }
    }
    solve_with(lp, false).expect("unperturbed solve always reports")
}

fn solve_with<S: Scalar>(lp: &LinearProgram<S>, perturb: bool) -> Option<SolveReport<S>> {
    let mut lay = layout(lp);
    let m = lp.num_constraints();
    let tol = S::tol();

    // Normalise rows to a non-negative right-hand side. A `>=` row with
    // zero right-hand side is negated so its slack can start in the basis.
    struct Row<S> {
        coeffs: Vec<(usize, S)>,
        rel: Relation,
        rhs: S,
    }
    let rows: Vec<Row<S>> = lp
        .constraints()
        .iter()
        .map(|c| {
            let mut coeffs = Vec::with_capacity(c.terms.len() * 2);
            for (j, a) in &c.terms {
                let (pos, neg) = lay.columns[*j];
                coeffs.push((pos, a.clone()));
                if let Some(neg) = neg {
                    coeffs.push((neg, -a.clone()));
                }
            }
            let flip = c.rhs < S::zero() || (c.rhs.is_zero() && c.relation == Relation::Ge);
            if flip {
                Row {
                    coeffs: coeffs.into_iter().map(|(j, a)| (j, -a)).collect(),
                    rel: match c.relation {
                        Relation::Ge => Relation::Le,
                        Relation::Le => Relation::Ge,
                        Relation::Eq => Relation::Eq,
                    },
                    rhs: -c.rhs.clone(),
                }
            } else {
                Row {
                    coeffs,
                    rel: c.relation,
                    rhs: c.rhs.clone(),
                }
            }
        })
        .collect();
    let artificials = rows.iter().filter(|r| r.rel != Relation::Le).count();
    lay.width = lay.artificial_start + artificials;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cost: vec![S::zero(); lay.width],
        value: S::zero(),
        tol: tol.clone(),
        drop: tol.clone() / S::of_u64(1000),
        pivots: 0,
    };
    let (mut slack, mut art) = (lay.structural, lay.artificial_start);
    let original_rhs: Vec<S> = rows.iter().map(|r| r.rhs.clone()).collect();
    let mut perturbed = false;
    for (idx, mut row) in rows.into_iter().enumerate() {
        if perturb && row.rel == Relation::Le && row.rhs.is_zero() {
            let spread = S::of_u64(1000 + (idx as u64 * 7919) % 1000) / S::of_u64(1_000_000_000);
            row.rhs = spread;
            perturbed = true;
        }
        let mut dense = vec![S::zero(); lay.width];
        for (j, a) in row.coeffs {
            dense[j] = dense[j].clone() + a;
        }
        let basic = match row.rel {
            Relation::Le => {
                dense[slack] = S::one();
                slack += 1;
                slack - 1
            }
            Relation::Ge => {
                dense[slack] = -S::one();
                slack += 1;
                dense[art] = S::one();
                art += 1;
                art - 1
            }
            Relation::Eq => {
                dense[art] = S::one();
                art += 1;
                art - 1
            }
        };
        if basic >= lay.artificial_start {
            // Phase-one cost is the sum of artificials, priced out here.
            for (j, v) in dense.iter().enumerate().take(lay.artificial_start) {
                if !v.is_zero() {
                    tab.cost[j] = tab.cost[j].clone() - v.clone();
                }
            }
            tab.value = tab.value.clone() - row.rhs.clone();
        }
        tab.rows.push(dense);
        tab.rhs.push(row.rhs);
        tab.basis.push(basic);
    }

    let initial_basis = tab.basis.clone();
    let fail = |status, pivots| {
        Some(SolveReport {
            status,
            objective: None,
            solution: Vec::new(),
            pivots,
            mode: S::MODE,
        })
    };

    if artificials > 0 {
        match tab.run(lay.width) {
            Outcome::Limit => return fail(Status::IterationLimit, tab.pivots),
            Outcome::Unbounded => unreachable!("phase one is bounded below by zero"),
            Outcome::Optimal => {}
        }
        if -tab.value.clone() > tol.clone() * (S::one() + S::of_u64(m as u64)) {
            return fail(Status::Infeasible, tab.pivots);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= lay.artificial_start {
                let entering = (0..lay.artificial_start).find(|&j| tab.rows[i][j].abs() > tol);
                match entering {
                    Some(c) => tab.pivot(i, c),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase two on the original objective, always minimising.
    let negate = lp.sense() == Sense::Maximize;
    tab.cost = vec![S::zero(); lay.width];
    for (j, c) in lp.objective().iter().enumerate() {
        let c = if negate { -c.clone() } else { c.clone() };
        let (pos, neg) = lay.columns[j];
        tab.cost[pos] = c.clone();
        if let Some(neg) = neg {
            tab.cost[neg] = -c;
        }
    }
    tab.value = S::zero();
    for i in 0..tab.rows.len() {
        let cb = tab.cost[tab.basis[i]].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..lay.width {
            if !tab.rows[i][j].is_zero() {
                tab.cost[j] = tab.cost[j].clone() - cb.clone() * tab.rows[i][j].clone();
            }
        }
        tab.value = tab.value.clone() - cb * tab.rhs[i].clone();
    }
    match tab.run(lay.artificial_start) {
        Outcome::Limit => return fail(Status::IterationLimit, tab.pivots),
        Outcome::Unbounded => return fail(Status::Unbounded, tab.pivots),
        Outcome::Optimal => {}
    }
    if perturbed {
        // Column `initial_basis[i]` of the final tableau is `B^-1 e_i`.
        let mut rhs = vec![S::zero(); tab.rows.len()];
        for (i, b) in original_rhs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let col = initial_basis[i];
            for (r, slot) in rhs.iter_mut().enumerate() {
                let a = &tab.rows[r][col];
                if !a.is_zero() {
                    *slot = slot.clone() + a.clone() * b.clone();
                }
            }
        }
        if rhs.iter().any(|v| *v < -tol.clone()) {
            return None;
        }
        tab.rhs = rhs
            .into_iter()
            .map(|v| if v < S::zero() { S::zero() } else { v })
            .collect();
    }

    let mut column_values = vec![S::zero(); lay.width];
    for (i, &b) in tab.basis.iter().enumerate() {
        column_values[b] = tab.rhs[i].clone();
    }
    let solution: Vec<S> = lay
        .columns
        .iter()
        .map(|(pos, neg)| {
            let v = column_values[*pos].clone();
            match neg {
                Some(n) => v - column_values[*n].clone(),
                None => v,
            }
        })
        .collect();
    let objective = lp.evaluate(&solution);
    Some(SolveReport {
        status: Status::Optimal,
        objective: Some(objective),
        solution,
        pivots: tab.pivots,
        mode: S::MODE,
    })
}
