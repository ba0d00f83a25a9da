use nalgebra::{DMatrix, SymmetricEigen};

use super::HarnessError;
use crate::model::DataMatrix;

/// Leading principal directions of a data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    /// `n × k` coordinates of the rows along the leading directions.
    pub scores: DataMatrix,
    pub singular_values: Vec<f64>,
    /// Share of the squared Frobenius norm captured by the `k` directions.
    pub energy_ratio: f64,
}

/// Rank-`k` SVD coordinates of `y` (PCA scores when `center` is set),
/// computed from the eigendecomposition of the smaller Gram matrix.
///
/// Each score column is signed so that its largest-magnitude entry is
/// positive.
pub fn top_components(y: &DataMatrix, k: usize, center: bool) -> Result<Components, HarnessError> {
    let (n, p) = (y.nrows(), y.ncols());
    if k == 0 || k > n.min(p) {
        return Err(HarnessError::Pipeline(format!("cannot take {k} components of a {n} × {p} matrix")));
    }
    let mut m = y.to_nalgebra();
    if center {
        for mut col in m.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
    }
    let total: f64 = m.iter().map(|v| v * v).sum();
    let small_side_is_p = p <= n;
    let gram = if small_side_is_p { m.transpose() * &m } else { &m * m.transpose() };
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let top = &order[..k];

    let lambdas: Vec<f64> = top.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let mut scores = DMatrix::<f64>::zeros(n, k);
    for (c, &i) in top.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let col = if small_side_is_p { &m * v } else { v * lambdas[c].sqrt() };
        scores.set_column(c, &col);
    }
    for mut col in scores.column_iter_mut() {
        let pivot = col.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    let rows: Vec<Vec<f64>> = scores.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(Components {
        scores: DataMatrix::from_rows(&rows)?,
        singular_values: lambdas.iter().map(|l| l.sqrt()).collect(),
        energy_ratio: if total > 0.0 { lambdas.iter().sum::<f64>() / total } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_matrix() {
        // Rows spanned by two orthogonal directions with weights 3 and 1.
        let rows: Vec<[f64; 4]> = (0..6)
            .map(|i| {
                let (a, b) = ((i as f64).sin() * 3.0, (i as f64 * 1.3).cos());
                [a, b, 0.0, 0.0]
            })
            .collect();
        let y = DataMatrix::from_rows(&rows).unwrap();
        let c = top_components(&y, 2, false).unwrap();
        assert!((c.energy_ratio - 1.0).abs() < 1e-12);
        let wide = DataMatrix::from_rows(&rows.iter().map(|r| [r[0], r[1], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).collect::<Vec<_>>()).unwrap();
        let cw = top_components(&wide.select_rows(&[0, 1, 2]), 2, false).unwrap();
        let ct = top_components(&y.select_rows(&[0, 1, 2]), 2, false).unwrap();
        for (a, b) in cw.scores.as_slice().iter().zip(ct.scores.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(top_components(&y, 5, false).is_err());
    }
}
