//! Simulation and geometry toolkit for the random function model of
//! high-dimensional data.
//!
//! Observations are generated as `Y_i = Σ^{1/2}(z_i) X(z_i) + μ(z_i) + σ E_i`
//! from points `z_i` on a compact latent space. The crate covers the full
//! path from that generative model to the geometry of the resulting point
//! cloud:
//!
//! * [`model`]: latent spaces, finite-rank feature maps and the sampler.
//! * [`concentration`]: Gram/cosine statistics, ambient intrinsic dimension,
//!   the generalised Hanson-Wright tail bound and deviation rate studies.
//! * [`homology`]: Vietoris-Rips persistence up to dimension 2, Betti
//!   estimates, bottleneck / Hausdorff distances and a Gromov-Hausdorff
//!   upper bound.
//! * [`geodesic`]: latent metrics (including the flat-torus teleport
//!   metric), k-NN graphs, shortest paths and the isometry regression.
//! * [`harness`]: configuration, CSV/JSON I/O and end-to-end pipelines.

pub mod concentration;
pub mod geodesic;
pub mod harness;
pub mod homology;
pub mod model;
pub mod stats;

pub use model::DataMatrix;

/// Library version echoed into every experiment report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
