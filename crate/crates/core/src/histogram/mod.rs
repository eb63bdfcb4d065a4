//! The simplex lattice `H^n_K`, its affine extension, distances, neighbor
//! structure and the multinomial prior.

mod point;
mod prior;
mod records;
mod space;

pub use point::{
    classify_neighbors, graph_distance, l1_distance, neighbors, ExtendedHistogram, Histogram,
    LatticePoint, NeighborClasses, DENSE_K_THRESHOLD,
};
pub use prior::{prior_mass, MultinomialPrior};
pub use records::{
    histogram_from_json, histogram_of_records, histogram_to_json, read_records_csv,
    write_records_csv, Attribute, Schema,
};
pub use space::{enumerate_histograms, histogram_count, HistogramIter, HistogramSpace};
