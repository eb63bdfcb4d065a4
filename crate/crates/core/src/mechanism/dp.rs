use serde::Serialize;

use crate::numeric::Scalar;

use super::table::KernelTable;

/// The worst neighbor/output triple found by [`dp_check`]: `θ W(g|h)`
/// exceeds `W(g|hhat)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub h: Vec<u64>,
    pub hhat: Vec<u64>,
    pub g: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DPReport {
    pub passed: bool,
    /// Smallest `W(g|hhat) / W(g|h)` over ordered neighbor pairs with
    /// `W(g|h) > 0`. Zero when some output is reachable from one side only.
    pub worst_ratio: f64,
    pub violation: Option<Violation>,
    /// Ordered neighbor pairs times outputs in the support.
    pub checked: u64,
}

/// Checks `W(g|hhat) >= θ W(g|h)` for every ordered neighbor pair and every
/// output any row can produce, with slack `tol` on `θ`. Running over both
/// orders covers the upper bound `W(g|hhat) <= W(g|h) / θ` as well.
pub fn dp_check<S: Scalar>(table: &KernelTable<S>, tol: &S) -> DPReport {
    let space = table.space();
    let support = table.support();
    let floor = table.theta().clone() - tol.clone();
    let mut worst: Option<(S, usize, usize, usize)> = None;
    let mut checked = 0u64;
    for (h, hh) in space.ordered_pairs() {
        for &g in &support {
            checked += 1;
            let base = table.prob(h, g);
            if *base <= S::zero() {
                continue;
            }
            let ratio = table.prob(hh, g).clone() / base.clone();
            if worst.as_ref().is_none_or(|(w, ..)| ratio < *w) {
                worst = Some((ratio, h, hh, g));
            }
        }
    }
    let (passed, worst_ratio, violation) = match worst {
        None => (true, 1.0, None),
        Some((ratio, h, hh, g)) => {
            let passed = ratio >= floor;
            let violation = (!passed).then(|| Violation {
                h: space.counts(h).to_vec(),
                hhat: space.counts(hh).to_vec(),
                g: space.counts(g).to_vec(),
            });
            (passed, ratio.to_f64_lossy(), violation)
        }
    };
    DPReport {
        passed,
        worst_ratio,
        violation,
        checked,
    }
}
