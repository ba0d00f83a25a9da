use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ArtifactWriter, ExperimentConfig, HarnessError, Manifold};
use crate::geodesic::{
    isometry_regression, knn_graph, shortest_paths, GeodesicMatrix, GraphMetric, IsometryReport, NeighborCount, Sources,
    Window,
};
use crate::model::{
    make_feature_map, sample_data, sample_latent, DataMatrix, FeatureMapRequest, LatentSample, LatentSpace, ModelSpec,
    SamplingScheme,
};

/// ChaCha stream reserved for subsampling, disjoint from the sampler's.
const SUBSAMPLE_STREAM: u64 = u64::MAX - 1;

/// `m` sorted indices drawn uniformly without replacement from `0..n`
/// (all of them when `m ≥ n`).
pub(crate) fn subsample(n: usize, m: usize, seed: u64) -> Vec<usize> {
    if m >= n {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SUBSAMPLE_STREAM);
    let mut idx = sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    idx
}

/// One synthetic draw and the model that produced it.
pub(crate) struct Draw {
    pub latent: LatentSample,
    pub inputs: LatentSample,
    pub spec: ModelSpec,
    pub y: DataMatrix,
}

impl Draw {
    /// Feature rows `φ(z_i)` of the selected points, scaled by `p^{-1/2}`.
    pub fn scaled_features(&self, idx: &[usize]) -> Result<DataMatrix, HarnessError> {
        let phi = self.spec.feature_map.feature_matrix(&self.inputs.select(idx))?;
        Ok(phi.scaled(1.0 / (self.spec.p as f64).sqrt()))
    }
}

pub(crate) fn circle_draw(cfg: &ExperimentConfig, n: usize, p: usize, seed: u64) -> Result<Draw, HarnessError> {
    let latent = sample_latent(&LatentSpace::Circle { radius: 1.0 }, n, cfg.sampling, seed)?;
    draw(cfg, latent.clone(), latent, FeatureMapRequest::ToyCircle { p }, seed)
}

/// Clifford-torus draw: rhombus points, mapped to angles for the features.
pub(crate) fn torus_draw(cfg: &ExperimentConfig, n: usize, p: usize, seed: u64) -> Result<Draw, HarnessError> {
    let (r1, r2) = rhombus(cfg);
    let latent = sample_latent(&LatentSpace::FlatTorusRhombus { r1, r2 }, n, cfg.sampling, seed)?;
    let angles = LatentSample::from_points(LatentSpace::CustomPointSet { dim: 2 }, latent.torus_angles()?)?;
    draw(cfg, latent, angles, FeatureMapRequest::TorusFourier { p }, seed)
}

fn draw(
    cfg: &ExperimentConfig,
    latent: LatentSample,
    inputs: LatentSample,
    request: FeatureMapRequest,
    seed: u64,
) -> Result<Draw, HarnessError> {
    let mut spec = ModelSpec::new(make_feature_map(request)?, cfg.sigma_sq.sqrt(), seed);
    spec.coef_family = cfg.coef_family;
    spec.noise_family = cfg.noise_family;
    let y = sample_data(&spec, &inputs)?;
    Ok(Draw { latent, inputs, spec, y })
}

pub(crate) fn rhombus(cfg: &ExperimentConfig) -> ([f64; 2], [f64; 2]) {
    (cfg.r1.unwrap_or([1.0, 0.0]), cfg.r2.unwrap_or([0.0, 1.0]))
}

pub(crate) fn seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.seeds as u64).map(|s| cfg.seed.wrapping_add(s)).collect()
}

/// Scaled features `p^{-1/2}φ` on a deterministic grid of about `m` latent
/// points of the configured manifold.
pub(crate) fn reference_features(cfg: &ExperimentConfig, p: usize, m: usize) -> Result<DataMatrix, HarnessError> {
    let (space, request) = match cfg.manifold {
        Manifold::Circle => (LatentSpace::Circle { radius: 1.0 }, FeatureMapRequest::ToyCircle { p }),
        Manifold::Torus => {
            let (r1, r2) = rhombus(cfg);
            (LatentSpace::FlatTorusRhombus { r1, r2 }, FeatureMapRequest::TorusFourier { p })
        }
    };
    let mut grid = sample_latent(&space, m, SamplingScheme::UniformGrid, 0)?;
    if cfg.manifold == Manifold::Torus {
        grid = LatentSample::from_points(LatentSpace::CustomPointSet { dim: 2 }, grid.torus_angles()?)?;
    }
    let phi = make_feature_map(request)?.feature_matrix(&grid)?;
    Ok(phi.scaled(1.0 / (p as f64).sqrt()))
}

pub(crate) fn neighbor_count(cfg: &ExperimentConfig) -> NeighborCount {
    if cfg.k == 0 { NeighborCount::Auto } else { NeighborCount::Fixed(cfg.k) }
}

/// All sources when every pair fits in `max_pairs`, otherwise
/// `⌈max_pairs / (n − 1)⌉` seeded sources.
pub(crate) fn choose_sources(n: usize, max_pairs: usize, seed: u64) -> Sources {
    if n < 2 || n * (n - 1) / 2 <= max_pairs {
        return Sources::All;
    }
    Sources::Subset(subsample(n, max_pairs.div_ceil(n - 1), seed))
}

/// Shortest-path lengths on the k-NN graph of `points` under `metric`.
pub(crate) fn graph_geodesics(
    points: &DataMatrix,
    metric: &GraphMetric,
    k: NeighborCount,
    sources: &Sources,
) -> Result<(GeodesicMatrix, usize), HarnessError> {
    let g = knn_graph(points, metric, k)?;
    let lengths = shortest_paths(&g, sources)?;
    if lengths.has_unreachable() {
        return Err(HarnessError::Pipeline(format!(
            "the k={} neighbour graph is disconnected; set k to 0 to choose k automatically",
            g.k
        )));
    }
    Ok((lengths, g.k))
}

/// Runs the regression and writes its moving average as
/// `bin_center,mean,std`.
pub(crate) fn regress_and_write(
    writer: &mut ArtifactWriter,
    file: &str,
    lz: &GeodesicMatrix,
    ly: &GeodesicMatrix,
) -> Result<(IsometryReport, String), HarnessError> {
    let report = isometry_regression(lz, ly, Window::Auto)?;
    let mut csv = String::from("bin_center,mean,std\n");
    for m in &report.moving_average {
        csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", m.center, m.mean, m.std));
    }
    let path = writer.write(file, csv.as_bytes())?;
    Ok((report, path))
}
