//! Concentration of dot products: Gram/cosine statistics, ambient intrinsic
//! dimension, the generalised Hanson-Wright tail bound and deviation rate
//! studies.

mod bounds;
mod deviation;
mod gram;
mod rate;

pub use bounds::{ambient_intrinsic_dim, ghw_tail_bound};
pub use deviation::{max_gram_deviation, DeviationReport, Normalization};
pub use gram::{gram_stats, GramStats};
pub use rate::{rate_study, RateCell, RateStudy, RateTemplate};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum ConcentrationError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row {row} has zero norm; cosine similarity undefined")]
    ZeroNormRow { row: usize },
    #[error("feature vector {row} has zero norm; γ(σ) undefined")]
    ZeroFeatureNorm { row: usize },
    #[error("degenerate rate grid: {0}")]
    DegenerateGrid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
