use std::fmt::Write as _;

use ehrhart_dp::histogram::{histogram_count, HistogramSpace};
use ehrhart_dp::Error;
use num_bigint::BigUint;

use crate::config::{emit, limits, CliResult, Common};

fn label(counts: &[u64]) -> String {
    let parts: Vec<String> = counts.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

/// DOT text of the neighbor graph: one vertex per histogram, one edge per
/// unordered neighbor pair.
pub fn dot(space: &HistogramSpace) -> String {
    let mut out = format!("graph H_n{}_k{} {{\n", space.n(), space.k());
    for v in 0..space.len() {
        writeln!(out, "  v{v} [label=\"{}\"];", label(space.counts(v))).unwrap();
    }
    for (a, b) in space.ordered_pairs().filter(|(a, b)| a < b) {
        writeln!(out, "  v{a} -- v{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn run(c: &Common) -> CliResult<()> {
    c.check_k()?;
    let limits = limits()?;
    let size = histogram_count(c.n, c.k);
    if size > BigUint::from(limits.graph_vertices) {
        return Err(Error::Capacity {
            what: "graph",
            required: format!("{size} vertices"),
            cap: limits.graph_vertices,
        }
        .into());
    }
    let space = HistogramSpace::new(c.n, c.k, &limits)?;
    emit(c.out.as_deref(), &dot(&space))
}
