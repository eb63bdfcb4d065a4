/// Size caps that guard against accidental exponential work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of histograms produced by an enumeration.
    pub enumeration: u64,
    /// Maximum number of candidate vectors for brute-force face counting.
    pub bruteforce: u64,
    /// Maximum number of primal LP variables (`|H|^2`).
    pub lp_variables: u64,
    /// Maximum number of vertices in an emitted constraint graph.
    pub graph_vertices: u64,
    /// Maximum number of series terms before giving up.
    pub series_terms: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 5_000_000,
            bruteforce: 200_000_000,
            lp_variables: 2_500,
            graph_vertices: 500,
            series_terms: 1_000_000,
        }
    }
}

impl Limits {
    /// Replaces every size cap with `cap` (the series guard is left alone).
    pub fn with_override(cap: u64) -> Self {
        Limits {
            enumeration: cap,
            bruteforce: cap,
            lp_variables: cap,
            graph_vertices: cap,
            ..Limits::default()
        }
    }
}
