//! Latent metrics, k-NN graphs, graph geodesics and the isometry regression.

mod graph;
mod metric;
mod paths;
mod regression;
mod smooth;

pub use graph::{knn_graph, GraphMetric, KnnGraph, NeighborCount};
pub use metric::{latent_distance, superimpose_on_rhombus, LatentMetric};
pub use paths::{retessellated_geodesics, shortest_paths, GeodesicMatrix, Sources};
pub use regression::{isometry_regression, IsometryReport, MovingAveragePoint, Window};
pub use smooth::{smooth_path_lengths, Smoothed, DEFAULT_SMOOTHING_NEIGHBORS};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point {index} lies outside the rhombus")]
    OutsideDomain { index: usize },
    #[error("edge {from}-{to} has invalid weight {weight}")]
    InvalidWeight { from: usize, to: usize, weight: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("latent path lengths have zero variance over the used pairs")]
    ZeroVariance,
    #[error(transparent)]
    Model(#[from] ModelError),
}
