//! Rips persistent homology, diagram distances and Gromov-Hausdorff bounds.

mod betti;
mod bottleneck;
mod diagram;
mod distance;
mod metric;
mod rips;

pub use betti::{betti_estimate, BettiEstimate, DEFAULT_RATIO_THRESHOLD};
pub use bottleneck::{bottleneck_distance, Bottleneck};
pub use diagram::{PersistenceDiagram, PersistencePair};
pub use distance::{distance_matrix, scale_rows, DistanceMatrix, Scaling};
pub use metric::{gh_upper_bound, hausdorff_distance};
pub use rips::{rips_persistence, rips_persistence_with_budget, DEFAULT_SIMPLEX_BUDGET};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("invalid distance matrix: {0}")]
    InvalidDistance(String),
    #[error("row {row} has zero norm and cannot be self-normalised")]
    ZeroRow { row: usize },
    #[error("homology above dimension 2 is not supported (requested {0})")]
    UnsupportedDimension(usize),
    #[error("{count} simplices of dimension {dim} exceed the budget of {budget}")]
    SimplexBudget { dim: usize, count: usize, budget: usize },
    #[error("simplex indices overflow 64 bits for {n} points")]
    IndexOverflow { n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}
