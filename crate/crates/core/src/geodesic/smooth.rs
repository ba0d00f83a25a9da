use rayon::prelude::*;

use super::graph::neighbor_lists;
use super::{GeodesicError, GeodesicMatrix, GraphMetric};
use crate::model::{euclidean, DataMatrix};

/// Neighbourhood size used when smoothing path lengths over positions.
pub const DEFAULT_SMOOTHING_NEIGHBORS: usize = 10;

/// Smoothed lengths and the number of `(source, target)` entries whose
/// neighbourhood was equidistant from the source, where uniform weights were
/// used instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub lengths: GeodesicMatrix,
    pub uniform_fallbacks: usize,
}

/// Replaces each `L(i, j)` by a weighted mean of `L(i, k)` over the
/// `k_smooth` points nearest to `j` in position space (`j` included).
///
/// Point `k` gets weight proportional to
/// `max_l ‖ξ_l − ξ_i‖ − ‖ξ_k − ξ_i‖` over the neighbourhood, so points
/// farther from the source count less.
pub fn smooth_path_lengths(l: &GeodesicMatrix, positions: &DataMatrix, k_smooth: usize) -> Result<Smoothed, GeodesicError> {
    let n = l.n();
    if positions.nrows() != n {
        return Err(GeodesicError::DimensionMismatch(format!(
            "{} positions for {n} vertices",
            positions.nrows()
        )));
    }
    if k_smooth < 2 {
        return Err(GeodesicError::InvalidArgument(format!("smoothing needs at least 2 neighbours, got {k_smooth}")));
    }
    let k_smooth = k_smooth.min(n);
    let neighborhoods: Vec<Vec<usize>> = neighbor_lists(positions, &GraphMetric::AmbientEuclid, k_smooth - 1)
        .into_iter()
        .enumerate()
        .map(|(j, list)| std::iter::once(j).chain(list.into_iter().map(|e| e.0)).collect())
        .collect();

    let rows: Vec<(Vec<f64>, usize)> = (0..l.sources().len())
        .into_par_iter()
        .map(|row| {
            let xi = positions.row(l.sources()[row]);
            let lengths = l.row(row);
            let mut fallbacks = 0;
            let mut dist = Vec::with_capacity(k_smooth);
            let out = neighborhoods
                .iter()
                .map(|nbhd| {
                    dist.clear();
                    dist.extend(nbhd.iter().map(|&k| euclidean(positions.row(k), xi)));
                    let (weights, uniform) = weights(&dist);
                    fallbacks += usize::from(uniform);
                    nbhd.iter().zip(&weights).map(|(&k, w)| w * lengths[k]).sum()
                })
                .collect();
            (out, fallbacks)
        })
        .collect();

    let uniform_fallbacks = rows.iter().map(|r| r.1).sum();
    let lengths = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(Smoothed {
        lengths: GeodesicMatrix::new(n, l.sources().to_vec(), lengths)?,
        uniform_fallbacks,
    })
}

/// Normalised weights `max(d) − d_k`; uniform when all distances agree.
pub(crate) fn weights(dist: &[f64]) -> (Vec<f64>, bool) {
    let max = dist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = dist.iter().map(|d| max - d).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        (raw.iter().map(|r| r / total).collect(), false)
    } else {
        (vec![1.0 / dist.len() as f64; dist.len()], true)
    }
}
