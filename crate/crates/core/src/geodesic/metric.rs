use serde::{Deserialize, Serialize};

use super::GeodesicError;
use crate::model::{torus3d_point, DataMatrix, RhombusBasis};

/// Distance on the latent space of each model of physical position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatentMetric {
    /// Plain Euclidean distance between physical positions.
    OpenFieldEuclid,
    /// Euclidean distance between points superimposed on the rhombus.
    RhombusEuclid { r1: [f64; 2], r2: [f64; 2] },
    /// Euclidean distance with opposite rhombus edges identified.
    RhombusTeleport { r1: [f64; 2], r2: [f64; 2] },
    /// Chordal distance on a torus in R³; points are angle pairs.
    Torus3D { major: f64, minor: f64 },
}

impl LatentMetric {
    pub fn validate(&self) -> Result<(), GeodesicError> {
        match *self {
            LatentMetric::OpenFieldEuclid => Ok(()),
            LatentMetric::RhombusEuclid { r1, r2 } | LatentMetric::RhombusTeleport { r1, r2 } => {
                RhombusBasis::new(r1, r2)?;
                Ok(())
            }
            LatentMetric::Torus3D { major, minor } => {
                if major > minor && minor > 0.0 && major.is_finite() {
                    Ok(())
                } else {
                    Err(GeodesicError::InvalidArgument(format!(
                        "torus radii need R > r > 0, got R={major}, r={minor}"
                    )))
                }
            }
        }
    }

    pub fn input_dim(&self) -> usize {
        2
    }

    fn basis(&self) -> Option<RhombusBasis> {
        match *self {
            LatentMetric::RhombusEuclid { r1, r2 } | LatentMetric::RhombusTeleport { r1, r2 } => {
                RhombusBasis::new(r1, r2).ok()
            }
            _ => None,
        }
    }

    /// Checks every row of `points` against the metric's domain.
    pub fn check_points(&self, points: &DataMatrix) -> Result<(), GeodesicError> {
        self.validate()?;
        if points.ncols() != self.input_dim() {
            return Err(GeodesicError::DimensionMismatch(format!(
                "latent metric expects 2-dimensional points, got {}",
                points.ncols()
            )));
        }
        if let Some(basis) = self.basis() {
            if let Some(index) = points.rows_iter().position(|z| !basis.contains(z)) {
                return Err(GeodesicError::OutsideDomain { index });
            }
        }
        Ok(())
    }

    /// Distance without domain checks; callers validate once up front.
    pub(crate) fn eval(&self, z: &[f64], w: &[f64]) -> f64 {
        match *self {
            LatentMetric::OpenFieldEuclid | LatentMetric::RhombusEuclid { .. } => (z[0] - w[0]).hypot(z[1] - w[1]),
            LatentMetric::RhombusTeleport { r1, r2 } => {
                // Working from the difference keeps the metric exactly
                // symmetric: the translate set is closed under negation.
                let d = [z[0] - w[0], z[1] - w[1]];
                let mut best = f64::INFINITY;
                for a in [-1.0, 0.0, 1.0] {
                    for b in [-1.0, 0.0, 1.0] {
                        let tx = a * r1[0] + b * r2[0];
                        let ty = a * r1[1] + b * r2[1];
                        best = best.min((d[0] + tx).hypot(d[1] + ty));
                    }
                }
                best
            }
            LatentMetric::Torus3D { major, minor } => {
                let p = torus3d_point(major, minor, z[0], z[1]);
                let q = torus3d_point(major, minor, w[0], w[1]);
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            }
        }
    }
}

/// Distance between two latent points under `metric`.
pub fn latent_distance(metric: &LatentMetric, z: &[f64], w: &[f64]) -> Result<f64, GeodesicError> {
    metric.validate()?;
    if z.len() != 2 || w.len() != 2 {
        return Err(GeodesicError::DimensionMismatch("latent points must be 2-dimensional".into()));
    }
    if let Some(basis) = metric.basis() {
        for (index, p) in [z, w].into_iter().enumerate() {
            if !basis.contains(p) {
                return Err(GeodesicError::OutsideDomain { index });
            }
        }
    }
    Ok(metric.eval(z, w))
}

/// Maps physical positions onto the rhombus spanned by `r1`, `r2` by
/// reducing their lattice coordinates modulo 1.
pub fn superimpose_on_rhombus(points: &DataMatrix, r1: [f64; 2], r2: [f64; 2]) -> Result<DataMatrix, GeodesicError> {
    let basis = RhombusBasis::new(r1, r2)?;
    if points.ncols() != 2 {
        return Err(GeodesicError::DimensionMismatch("positions must be 2-dimensional".into()));
    }
    let rows: Vec<[f64; 2]> = points
        .rows_iter()
        .map(|z| {
            let [a, b] = basis.coords(z);
            basis.point(a.rem_euclid(1.0), b.rem_euclid(1.0))
        })
        .collect();
    let out = if rows.is_empty() { DataMatrix::zeros(0, 2) } else { DataMatrix::from_rows(&rows)? };
    Ok(match &points.row_meta {
        Some(meta) => out.with_row_meta(meta.clone()),
        None => out,
    })
}
