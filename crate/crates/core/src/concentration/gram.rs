use nalgebra::DMatrix;
use rayon::prelude::*;

use super::ConcentrationError;
use crate::model::{dot, DataMatrix};

/// Pairwise dot products, cosine similarities and row norms of a data set.
#[derive(Debug, Clone, PartialEq)]
pub struct GramStats {
    pub gram: DMatrix<f64>,
    /// Present when requested; undefined for zero rows.
    pub cosine: Option<DMatrix<f64>>,
    pub norms: Vec<f64>,
}

/// Exact Gram matrix `Y_i·Y_j` and, if `with_cosine`, the cosine matrix.
pub fn gram_stats(y: &DataMatrix, with_cosine: bool) -> Result<GramStats, ConcentrationError> {
    let n = y.nrows();
    let lower: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| dot(y.row(i), y.row(j))).collect())
        .collect();
    let mut gram = DMatrix::zeros(n, n);
    for (i, row) in lower.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let norms: Vec<f64> = (0..n).map(|i| gram[(i, i)].sqrt()).collect();
    let cosine = if with_cosine {
        if let Some(row) = norms.iter().position(|&v| v == 0.0) {
            return Err(ConcentrationError::ZeroNormRow { row });
        }
        Some(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0
            } else {
                gram[(i, j)] / (norms[i] * norms[j])
            }
        }))
    } else {
        None
    };
    Ok(GramStats { gram, cosine, norms })
}
