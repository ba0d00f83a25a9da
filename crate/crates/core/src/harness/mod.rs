//! Configuration, artifact I/O and the end-to-end experiment pipelines.

mod common;
mod config;
mod io;
mod linalg;
mod pipelines;
mod report;

pub use config::{Experiment, ExperimentConfig, Manifold};
pub use io::{load_config, load_matrix, matrix_to_csv, save_matrix, save_report, ArtifactWriter, ManifestEntry, MANIFEST_FILE};
pub use linalg::{top_components, Components};
pub use pipelines::{
    run_concentration_rate, run_experiment, run_external, run_persistence_consistency, run_torus_isometry,
    run_toy_circle, RunOutcome, TIMINGS_FILE,
};
pub use report::{Check, ExperimentReport, REPORT_FILE};

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {msg}")]
    Matrix { path: PathBuf, msg: String },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Concentration(#[from] crate::concentration::ConcentrationError),
    #[error(transparent)]
    Homology(#[from] crate::homology::HomologyError),
    #[error(transparent)]
    Geodesic(#[from] crate::geodesic::GeodesicError),
    #[error("{0}")]
    Pipeline(String),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    /// Whether the error stems from user input or the file system rather
    /// than from a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, HarnessError::Io { .. } | HarnessError::Config(_) | HarnessError::Matrix { .. })
    }
}
