use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{gram_stats, ConcentrationError};
use crate::model::DataMatrix;

/// How observed dot products are compared with their noise-free targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Normalization {
    /// `|Y_i·Y_j/p − T_ij/p − σ²·1[i=j]|`.
    ByP,
    /// `|Y_i·Y_j − E[Y_i·Y_j]| / (E‖Y_i‖² E‖Y_j‖²)^{1/2}` with
    /// `E[Y_i·Y_j] = T_ij + pσ²·1[i=j]`.
    ByExpectedNorms,
    /// `|CosSim(Y_i, Y_j) − CosSim_T(i, j)/γ_ij(σ)|` over `i ≠ j`.
    SelfNormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeviationReport {
    pub max_abs_deviation: f64,
    pub normalization: Normalization,
    pub sigma_sq_used: f64,
    /// Per-pair deviations; excluded entries hold 0. Written to CSV, not JSON.
    #[serde(skip)]
    pub per_pair: Option<DMatrix<f64>>,
}

/// Maximum deviation of the observed Gram structure of `y` from the
/// noise-free target `target_gram` (the matrix `φ(z_i)·φ(z_j)` for identity
/// covariance).
///
/// `SelfNormalized` always excludes the diagonal. `keep_per_pair` retains the
/// full deviation matrix in the report.
pub fn max_gram_deviation(
    y: &DataMatrix,
    target_gram: &DMatrix<f64>,
    sigma: f64,
    normalization: Normalization,
    exclude_diagonal: bool,
    keep_per_pair: bool,
) -> Result<DeviationReport, ConcentrationError> {
    let n = y.nrows();
    if target_gram.nrows() != n || target_gram.ncols() != n {
        return Err(ConcentrationError::DimensionMismatch(format!(
            "data has {n} rows but target Gram is {}×{}",
            target_gram.nrows(),
            target_gram.ncols()
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(ConcentrationError::InvalidArgument(format!("σ must be ≥ 0, got {sigma}")));
    }
    let p = y.ncols() as f64;
    let s2 = sigma * sigma;
    let exclude_diagonal = exclude_diagonal || normalization == Normalization::SelfNormalized;
    let stats = gram_stats(y, normalization == Normalization::SelfNormalized)?;
    let g = &stats.gram;

    let expected_sq_norm: Vec<f64> = (0..n).map(|i| target_gram[(i, i)] + p * s2).collect();
    if normalization == Normalization::ByExpectedNorms {
        if let Some(i) = expected_sq_norm.iter().position(|&v| !(v > 0.0)) {
            return Err(ConcentrationError::ZeroFeatureNorm { row: i });
        }
    }
    let gamma: Vec<f64> = if normalization == Normalization::SelfNormalized {
        (0..n)
            .map(|i| {
                let t = target_gram[(i, i)];
                if !(t > 0.0) {
                    Err(ConcentrationError::ZeroFeatureNorm { row: i })
                } else {
                    Ok(((t + p * s2) / t).sqrt())
                }
            })
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    let deviation = |i: usize, j: usize| -> f64 {
        let diag = if i == j { 1.0 } else { 0.0 };
        match normalization {
            Normalization::ByP => (g[(i, j)] / p - target_gram[(i, j)] / p - s2 * diag).abs(),
            Normalization::ByExpectedNorms => {
                (g[(i, j)] - target_gram[(i, j)] - p * s2 * diag).abs()
                    / (expected_sq_norm[i] * expected_sq_norm[j]).sqrt()
            }
            Normalization::SelfNormalized => {
                let cos_y = stats.cosine.as_ref().expect("cosine requested")[(i, j)];
                let cos_t = target_gram[(i, j)] / (target_gram[(i, i)] * target_gram[(j, j)]).sqrt();
                (cos_y - cos_t / (gamma[i] * gamma[j])).abs()
            }
        }
    };

    let mut max = 0.0f64;
    let mut per_pair = keep_per_pair.then(|| DMatrix::zeros(n, n));
    for i in 0..n {
        for j in 0..=i {
            if exclude_diagonal && i == j {
                continue;
            }
            let d = deviation(i, j);
            max = max.max(d);
            if let Some(m) = per_pair.as_mut() {
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
    }
    Ok(DeviationReport {
        max_abs_deviation: max,
        normalization,
        sigma_sq_used: s2,
        per_pair,
    })
}
