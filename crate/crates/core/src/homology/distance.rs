use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HomologyError;
use crate::model::{euclidean, DataMatrix};

/// How rows are rescaled before Euclidean distances are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Raw,
    /// Rows divided by `√p`.
    InvSqrtP,
    /// Rows divided by their own norm.
    SelfNormalized,
}

/// Symmetric `n × n` matrix of pairwise distances, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    pub scaling: Scaling,
}

impl DistanceMatrix {
    /// Wraps a full row-major matrix after checking symmetry, a zero
    /// diagonal and finite non-negative entries.
    pub fn from_full(n: usize, data: Vec<f64>, scaling: Scaling) -> Result<Self, HomologyError> {
        if data.len() != n * n {
            return Err(HomologyError::InvalidDistance(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(HomologyError::InvalidDistance(format!("d[{i}][{i}] = {} ≠ 0", data[i * n + i])));
            }
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if a != b {
                    return Err(HomologyError::InvalidDistance(format!("d[{i}][{j}] = {a} but d[{j}][{i}] = {b}")));
                }
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(HomologyError::InvalidDistance(format!("d[{i}][{j}] = {a} is not finite and ≥ 0")));
                }
            }
        }
        Ok(Self { n, data, scaling })
    }

    /// Builds the matrix from `d(i, j)` evaluated for `i > j`.
    pub fn from_fn<F>(n: usize, scaling: Scaling, f: F) -> Result<Self, HomologyError>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let lower: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| (0..i).map(|j| f(i, j)).collect()).collect();
        let mut data = vec![0.0; n * n];
        for (i, row) in lower.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::from_full(n, data, scaling)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `min_i max_j d(i, j)`: beyond this scale the Rips complex is a cone.
    pub fn enclosing_radius(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Restriction to the listed points, in order.
    pub fn select(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Self {
            n: m,
            data,
            scaling: self.scaling,
        }
    }

    /// Headerless CSV, either the full square or the strict lower triangle
    /// (row `i` holds `d(i, 0..i)`, so the first row is empty).
    pub fn to_csv(&self, lower_triangle: bool) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let end = if lower_triangle { i } else { self.n };
            let row: Vec<String> = (0..end).map(|j| format!("{:.16e}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Euclidean distances between the rows of `y` under `scaling`.
pub fn distance_matrix(y: &DataMatrix, scaling: Scaling) -> Result<DistanceMatrix, HomologyError> {
    let scaled = scale_rows(y, scaling)?;
    DistanceMatrix::from_fn(scaled.nrows(), scaling, |i, j| euclidean(scaled.row(i), scaled.row(j)))
}

/// Rows of `y` rescaled as `scaling` prescribes.
pub fn scale_rows(y: &DataMatrix, scaling: Scaling) -> Result<DataMatrix, HomologyError> {
    match scaling {
        Scaling::Raw => Ok(y.clone()),
        Scaling::InvSqrtP => Ok(y.scaled(1.0 / (y.ncols().max(1) as f64).sqrt())),
        Scaling::SelfNormalized => {
            let mut out = y.clone();
            for i in 0..y.nrows() {
                let norm = y.row_norm(i);
                if norm == 0.0 {
                    return Err(HomologyError::ZeroRow { row: i });
                }
                out.row_mut(i).iter_mut().for_each(|v| *v /= norm);
            }
            Ok(out)
        }
    }
}
