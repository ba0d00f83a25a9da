use serde::{Deserialize, Serialize};

use super::ModelError;

/// Dense row-major `n × p` matrix of observations (or feature-map
/// evaluations). Rows are samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    /// Optional index of the latent point each row was generated from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_meta: Option<Vec<usize>>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Every entry must be finite.
    pub fn from_row_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, ModelError> {
        if values.len() != rows * cols {
            return Err(ModelError::Shape(format!(
                "expected {rows}×{cols} = {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if rows > 0 && cols == 0 {
            return Err(ModelError::Shape("matrix with rows must have at least one column".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self {
            rows,
            cols,
            values,
            row_meta: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, ModelError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(ModelError::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, values)
    }

    /// `rows × cols` matrix of zeros; a zero-row matrix keeps its column count.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
            row_meta: None,
        }
    }

    pub fn with_row_meta(mut self, meta: Vec<usize>) -> Self {
        debug_assert_eq!(meta.len(), self.rows);
        self.row_meta = Some(meta);
        self
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// New matrix made of the listed rows, in order. Row metadata follows
    /// the selection.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            values,
            row_meta: self
                .row_meta
                .as_ref()
                .map(|m| idx.iter().map(|&i| m[i]).collect()),
        }
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| v * factor).collect(),
            row_meta: self.row_meta.clone(),
        }
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        dot(self.row(i), self.row(i)).sqrt()
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.values)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert!(matches!(
            DataMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]),
            Err(ModelError::NonFinite { row: 0, col: 1 })
        ));
        assert!(DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn select_rows_carries_meta() {
        let m = DataMatrix::from_rows(&[[1.0], [2.0], [3.0]])
            .unwrap()
            .with_row_meta(vec![10, 11, 12]);
        let s = m.select_rows(&[2, 0]);
        assert_eq!(s.as_slice(), &[3.0, 1.0]);
        assert_eq!(s.row_meta, Some(vec![12, 10]));
    }
}
