//! Latent spaces, finite-rank feature maps and the random function sampler.

mod data;
mod feature;
mod latent;
mod sampler;

pub use data::{dot, euclidean, DataMatrix};
pub use feature::{evaluate_kernel, make_feature_map, FeatureFn, FeatureMap, FeatureMapKind, FeatureMapRequest};
pub use latent::{sample_latent, torus3d_point, LatentSample, LatentSpace, RhombusBasis, SamplingScheme};
pub use sampler::{noise_free_gram, sample_data, Family, MeanFn, ModelSpec, MuRule, SigmaRule};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid latent space: {0}")]
    InvalidSpace(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("latent point {index} does not lie on the declared space")]
    OffSpace { index: usize },
    #[error("feature map rank {rank} exceeds ambient dimension p = {p}")]
    RankExceedsDimension { rank: usize, p: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("latent point {index} has kernel(z,z)/p = {variance}, unit variance required")]
    UnitVarianceViolated { index: usize, variance: f64 },
}
