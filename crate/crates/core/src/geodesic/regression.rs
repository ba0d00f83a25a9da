use serde::{Deserialize, Serialize};

use super::{GeodesicError, GeodesicMatrix};
use crate::stats::{fit_line, mean_std};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// `⌈0.01 · pairs⌉` pairs per window.
    Auto,
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingAveragePoint {
    /// Mean latent length within the window.
    pub center: f64,
    pub mean: f64,
    pub std: f64,
}

/// Linear fit of observed path lengths on latent path lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IsometryReport {
    pub slope: f64,
    pub intercept: f64,
    pub rho: f64,
    pub pairs_used: usize,
    pub window: usize,
    pub moving_average: Vec<MovingAveragePoint>,
}

/// Unordered pairs `{source, j}` covered by a geodesic matrix, each once.
pub(crate) fn pair_indices(m: &GeodesicMatrix) -> Vec<(usize, usize)> {
    let n = m.n();
    let mut is_source = vec![false; n];
    for &s in m.sources() {
        is_source[s] = true;
    }
    let mut pairs = Vec::new();
    for (row, &s) in m.sources().iter().enumerate() {
        for j in 0..n {
            if j != s && (!is_source[j] || s < j) {
                pairs.push((row, j));
            }
        }
    }
    pairs
}

/// OLS of `ly` on `lz` over the distinct pairs both matrices cover, with
/// Pearson ρ and a windowed moving average of `ly` along sorted `lz`.
pub fn isometry_regression(lz: &GeodesicMatrix, ly: &GeodesicMatrix, window: Window) -> Result<IsometryReport, GeodesicError> {
    if lz.n() != ly.n() || lz.sources() != ly.sources() {
        return Err(GeodesicError::DimensionMismatch(
            "latent and observed path lengths must share vertices and sources".into(),
        ));
    }
    let pairs = pair_indices(lz);
    let mut xy: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for &(row, j) in &pairs {
        let (x, y) = (lz.get(row, j), ly.get(row, j));
        if !x.is_finite() || !y.is_finite() {
            return Err(GeodesicError::InvalidArgument(format!(
                "non-finite path length between {} and {j}; is the graph connected?",
                lz.sources()[row]
            )));
        }
        xy.push((x, y));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = xy.iter().copied().unzip();
    let fit = fit_line(&x, &y).ok_or(GeodesicError::ZeroVariance)?;

    let window = match window {
        Window::Auto => (xy.len() as f64 * 0.01).ceil() as usize,
        Window::Count(w) => w,
    }
    .max(1);
    xy.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let moving_average = xy
        .chunks(window)
        .map(|chunk| {
            let xs: Vec<f64> = chunk.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = chunk.iter().map(|p| p.1).collect();
            let (mean, std) = mean_std(&ys);
            MovingAveragePoint { center: mean_std(&xs).0, mean, std }
        })
        .collect();

    Ok(IsometryReport {
        slope: fit.slope,
        intercept: fit.intercept,
        rho: fit.rho,
        pairs_used: xy.len(),
        window,
        moving_average,
    })
}
