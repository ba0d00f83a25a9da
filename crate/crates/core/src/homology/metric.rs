//! Set distances between point clouds.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::HomologyError;
use crate::model::{euclidean, DataMatrix};

/// Hausdorff distance between the row sets of `a` and `b`.
pub fn hausdorff_distance(a: &DataMatrix, b: &DataMatrix) -> Result<f64, HomologyError> {
    if a.is_empty() || b.is_empty() {
        return Err(HomologyError::InvalidArgument("Hausdorff distance needs nonempty clouds".into()));
    }
    if a.ncols() != b.ncols() {
        return Err(HomologyError::DimensionMismatch(format!(
            "clouds live in dimensions {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    Ok(directed(a, b).max(directed(b, a)))
}

fn directed(a: &DataMatrix, b: &DataMatrix) -> f64 {
    (0..a.nrows())
        .into_par_iter()
        .map(|i| {
            let ai = a.row(i);
            b.rows_iter().map(|bj| euclidean(ai, bj)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// `√(max |gram_y − gram_phi| / p)`: the distortion bound of the identity
/// correspondence between `p^{-1/2}Y` and `p^{-1/2}Φ`.
pub fn gh_upper_bound(gram_y: &DMatrix<f64>, gram_phi: &DMatrix<f64>, p: usize) -> Result<f64, HomologyError> {
    if gram_y.shape() != gram_phi.shape() || gram_y.nrows() != gram_y.ncols() {
        return Err(HomologyError::DimensionMismatch(format!(
            "Gram matrices of shape {:?} and {:?}",
            gram_y.shape(),
            gram_phi.shape()
        )));
    }
    if p == 0 {
        return Err(HomologyError::InvalidArgument("p must be positive".into()));
    }
    let max = gram_y.iter().zip(gram_phi.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((max / p as f64).sqrt())
}
