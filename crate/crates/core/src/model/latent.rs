use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataMatrix, ModelError};

const ON_SPACE_TOL: f64 = 1e-9;

/// A compact latent space together with its geometric parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatentSpace {
    Circle { radius: f64 },
    Interval { a: f64, b: f64 },
    Square { side: f64, center: [f64; 2] },
    /// Flat torus given by the rhombus spanned by `r1`, `r2`; points are
    /// stored in the plane as `a·r1 + b·r2` with `a, b ∈ [0, 1]`.
    FlatTorusRhombus { r1: [f64; 2], r2: [f64; 2] },
    /// Standard torus in R³ with major radius `major` and tube radius `minor`.
    EmbeddedTorus3D { major: f64, minor: f64 },
    /// Arbitrary externally supplied points of the given dimension.
    CustomPointSet { dim: usize },
}

/// Point placement scheme for [`sample_latent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    UniformGrid,
    UniformRandom,
}

/// Lattice basis of a rhombus, with the inverse needed to recover
/// rhombus coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhombusBasis {
    pub r1: [f64; 2],
    pub r2: [f64; 2],
    det: f64,
}

impl RhombusBasis {
    pub fn new(r1: [f64; 2], r2: [f64; 2]) -> Result<Self, ModelError> {
        let det = r1[0] * r2[1] - r1[1] * r2[0];
        let scale = (r1[0].hypot(r1[1]) * r2[0].hypot(r2[1])).max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-12 * scale {
            return Err(ModelError::InvalidSpace(format!(
                "rhombus vectors {r1:?} and {r2:?} are linearly dependent"
            )));
        }
        Ok(Self { r1, r2, det })
    }

    /// Coordinates `(a, b)` with `z = a·r1 + b·r2`.
    pub fn coords(&self, z: &[f64]) -> [f64; 2] {
        let a = (z[0] * self.r2[1] - z[1] * self.r2[0]) / self.det;
        let b = (self.r1[0] * z[1] - self.r1[1] * z[0]) / self.det;
        [a, b]
    }

    pub fn point(&self, a: f64, b: f64) -> [f64; 2] {
        [
            a * self.r1[0] + b * self.r2[0],
            a * self.r1[1] + b * self.r2[1],
        ]
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        let [a, b] = self.coords(z);
        (-ON_SPACE_TOL..=1.0 + ON_SPACE_TOL).contains(&a)
            && (-ON_SPACE_TOL..=1.0 + ON_SPACE_TOL).contains(&b)
    }

    /// Torus angles `(2πa, 2πb)` of a rhombus point.
    pub fn angles(&self, z: &[f64]) -> [f64; 2] {
        let [a, b] = self.coords(z);
        [TAU * a, TAU * b]
    }
}

impl LatentSpace {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidSpace(msg));
        match *self {
            LatentSpace::Circle { radius } if !(radius > 0.0 && radius.is_finite()) => {
                bad(format!("circle radius must be positive, got {radius}"))
            }
            LatentSpace::Interval { a, b } if !(a < b && a.is_finite() && b.is_finite()) => {
                bad(format!("interval needs a < b, got [{a}, {b}]"))
            }
            LatentSpace::Square { side, center } if !(side > 0.0 && side.is_finite()) || !center.iter().all(|c| c.is_finite()) => {
                bad(format!("square side must be positive, got {side}"))
            }
            LatentSpace::FlatTorusRhombus { r1, r2 } => RhombusBasis::new(r1, r2).map(|_| ()),
            LatentSpace::EmbeddedTorus3D { major, minor } if !(major > minor && minor > 0.0 && major.is_finite()) => {
                bad(format!("torus radii need R > r > 0, got R={major}, r={minor}"))
            }
            LatentSpace::CustomPointSet { dim } if dim == 0 => bad("custom point set needs dim ≥ 1".into()),
            _ => Ok(()),
        }
    }

    /// Ambient coordinate dimension of stored points.
    pub fn dim(&self) -> usize {
        match *self {
            LatentSpace::Interval { .. } => 1,
            LatentSpace::Circle { .. } | LatentSpace::Square { .. } | LatentSpace::FlatTorusRhombus { .. } => 2,
            LatentSpace::EmbeddedTorus3D { .. } => 3,
            LatentSpace::CustomPointSet { dim } => dim,
        }
    }

    /// Whether `z` lies on the space (within `1e-9`).
    pub fn contains(&self, z: &[f64]) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        match *self {
            LatentSpace::Circle { radius } => {
                (z[0] * z[0] + z[1] * z[1] - radius * radius).abs() <= ON_SPACE_TOL * radius.max(1.0).powi(2)
            }
            LatentSpace::Interval { a, b } => z[0] >= a - ON_SPACE_TOL && z[0] <= b + ON_SPACE_TOL,
            LatentSpace::Square { side, center } => z
                .iter()
                .zip(center)
                .all(|(x, c)| (x - c).abs() <= 0.5 * side + ON_SPACE_TOL),
            LatentSpace::FlatTorusRhombus { r1, r2 } => {
                RhombusBasis::new(r1, r2).map(|b| b.contains(z)).unwrap_or(false)
            }
            LatentSpace::EmbeddedTorus3D { major, minor } => {
                let rho = z[0].hypot(z[1]) - major;
                (rho * rho + z[2] * z[2] - minor * minor).abs() <= ON_SPACE_TOL * major.max(1.0).powi(2)
            }
            LatentSpace::CustomPointSet { .. } => z.iter().all(|v| v.is_finite()),
        }
    }
}

/// Points drawn on a latent space; one row of `points` per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentSample {
    pub space: LatentSpace,
    pub points: DataMatrix,
}

impl LatentSample {
    /// Wraps externally supplied points, checking each lies on `space`.
    pub fn from_points(space: LatentSpace, points: DataMatrix) -> Result<Self, ModelError> {
        space.validate()?;
        if !points.is_empty() && points.ncols() != space.dim() {
            return Err(ModelError::Shape(format!(
                "latent points have {} columns, space needs {}",
                points.ncols(),
                space.dim()
            )));
        }
        if let Some(i) = (0..points.nrows()).find(|&i| !space.contains(points.row(i))) {
            return Err(ModelError::OffSpace { index: i });
        }
        Ok(Self { space, points })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Torus angles for every point of a flat-torus rhombus sample, as a
    /// `n × 2` matrix.
    pub fn torus_angles(&self) -> Result<DataMatrix, ModelError> {
        let LatentSpace::FlatTorusRhombus { r1, r2 } = self.space else {
            return Err(ModelError::Unsupported("torus angles need a flat-torus rhombus sample".into()));
        };
        let basis = RhombusBasis::new(r1, r2)?;
        let rows: Vec<[f64; 2]> = self.points.rows_iter().map(|z| basis.angles(z)).collect();
        DataMatrix::from_rows(&rows)
    }

    /// Subsample keeping the listed rows.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            space: self.space.clone(),
            points: self.points.select_rows(idx),
        }
    }
}

/// Places `n` points on `space`.
///
/// `UniformGrid` is deterministic and ignores `seed`; on the rhombus and
/// the square it lays down an `m × m` lattice with `m = ⌊√n⌋`, so the
/// remainder `n − m²` is dropped. `UniformRandom` is reproducible from
/// `seed`.
pub fn sample_latent(
    space: &LatentSpace,
    n: usize,
    scheme: SamplingScheme,
    seed: u64,
) -> Result<LatentSample, ModelError> {
    space.validate()?;
    if n == 0 {
        return Err(ModelError::InvalidArgument("sample_latent needs n ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let lattice_side = (n as f64).sqrt().floor() as usize;
    // Largest m with m² ≤ n, guarding against float rounding.
    let lattice_side = (lattice_side.saturating_sub(1)..=lattice_side + 1)
        .filter(|m| m * m <= n)
        .max()
        .unwrap_or(1);
    match (space, scheme) {
        (LatentSpace::Circle { radius }, _) => {
            for k in 0..n {
                let t = match scheme {
                    SamplingScheme::UniformGrid => TAU * k as f64 / n as f64,
                    SamplingScheme::UniformRandom => TAU * rng.random::<f64>(),
                };
                rows.push(vec![radius * t.cos(), radius * t.sin()]);
            }
        }
        (LatentSpace::Interval { a, b }, _) => {
            for k in 0..n {
                let u = match scheme {
                    SamplingScheme::UniformGrid if n == 1 => 0.5,
                    SamplingScheme::UniformGrid => k as f64 / (n - 1) as f64,
                    SamplingScheme::UniformRandom => rng.random::<f64>(),
                };
                rows.push(vec![a + (b - a) * u]);
            }
        }
        (LatentSpace::Square { side, center }, SamplingScheme::UniformGrid) => {
            let m = lattice_side;
            for i in 0..m {
                for j in 0..m {
                    let u = (i as f64 + 0.5) / m as f64 - 0.5;
                    let v = (j as f64 + 0.5) / m as f64 - 0.5;
                    rows.push(vec![center[0] + side * u, center[1] + side * v]);
                }
            }
        }
        (LatentSpace::Square { side, center }, SamplingScheme::UniformRandom) => {
            for _ in 0..n {
                let u = rng.random::<f64>() - 0.5;
                let v = rng.random::<f64>() - 0.5;
                rows.push(vec![center[0] + side * u, center[1] + side * v]);
            }
        }
        (LatentSpace::FlatTorusRhombus { r1, r2 }, _) => {
            let basis = RhombusBasis::new(*r1, *r2)?;
            match scheme {
                SamplingScheme::UniformGrid => {
                    let m = lattice_side;
                    for i in 0..m {
                        for j in 0..m {
                            let p = basis.point(i as f64 / m as f64, j as f64 / m as f64);
                            rows.push(p.to_vec());
                        }
                    }
                }
                SamplingScheme::UniformRandom => {
                    for _ in 0..n {
                        let a = rng.random::<f64>();
                        let b = rng.random::<f64>();
                        rows.push(basis.point(a, b).to_vec());
                    }
                }
            }
        }
        (LatentSpace::EmbeddedTorus3D { major, minor }, _) => {
            let angle_pairs: Vec<(f64, f64)> = match scheme {
                SamplingScheme::UniformGrid => {
                    let m = lattice_side;
                    (0..m * m)
                        .map(|k| (TAU * (k / m) as f64 / m as f64, TAU * (k % m) as f64 / m as f64))
                        .collect()
                }
                SamplingScheme::UniformRandom => (0..n)
                    .map(|_| (TAU * rng.random::<f64>(), TAU * rng.random::<f64>()))
                    .collect(),
            };
            for (t1, t2) in angle_pairs {
                rows.push(torus3d_point(*major, *minor, t1, t2).to_vec());
            }
        }
        (LatentSpace::CustomPointSet { .. }, _) => {
            return Err(ModelError::Unsupported(
                "custom point sets cannot be sampled; supply the points directly".into(),
            ));
        }
    }
    let points = DataMatrix::from_rows(&rows)?;
    Ok(LatentSample {
        space: space.clone(),
        points,
    })
}

/// Embedding of torus angles `(θ1, θ2)` into R³.
pub fn torus3d_point(major: f64, minor: f64, theta1: f64, theta2: f64) -> [f64; 3] {
    let ring = major + minor * theta2.cos();
    [ring * theta1.cos(), ring * theta1.sin(), minor * theta2.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_grid_four_points() {
        let s = sample_latent(&LatentSpace::Circle { radius: 1.0 }, 4, SamplingScheme::UniformGrid, 0).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (i, (x, y)) in expected.iter().enumerate() {
            assert!((s.point(i)[0] - x).abs() < 1e-15 && (s.point(i)[1] - y).abs() < 1e-15);
        }
    }

    #[test]
    fn circle_grid_thousand_points_equally_spaced_and_on_circle() {
        let space = LatentSpace::Circle { radius: 1.0 };
        let a = sample_latent(&space, 1000, SamplingScheme::UniformGrid, 1).unwrap();
        let b = sample_latent(&space, 1000, SamplingScheme::UniformGrid, 99).unwrap();
        assert_eq!(a, b, "grid must not depend on the seed");
        assert_eq!(a.n(), 1000);
        let step = 2.0 * (PI / 1000.0).sin();
        for i in 0..1000 {
            let z = a.point(i);
            assert!((z[0] * z[0] + z[1] * z[1] - 1.0).abs() <= 1e-9);
            let w = a.point((i + 1) % 1000);
            let d = ((z[0] - w[0]).powi(2) + (z[1] - w[1]).powi(2)).sqrt();
            assert!((d - step).abs() < 1e-12);
        }
    }

    #[test]
    fn rhombus_random_is_reproducible_and_inside() {
        let space = LatentSpace::FlatTorusRhombus {
            r1: [1.0, 0.0],
            r2: [0.5, 3f64.sqrt() / 2.0],
        };
        let a = sample_latent(&space, 100, SamplingScheme::UniformRandom, 7).unwrap();
        let b = sample_latent(&space, 100, SamplingScheme::UniformRandom, 7).unwrap();
        assert_eq!(a.n(), 100);
        assert_eq!(a.points.as_slice(), b.points.as_slice());
        let basis = RhombusBasis::new([1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]).unwrap();
        for z in a.points.rows_iter() {
            let [u, v] = basis.coords(z);
            assert!((0.0..1.0 + 1e-12).contains(&u) && (0.0..1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn rhombus_grid_drops_remainder() {
        let space = LatentSpace::FlatTorusRhombus { r1: [1.0, 0.0], r2: [0.0, 1.0] };
        let s = sample_latent(&space, 10, SamplingScheme::UniformGrid, 0).unwrap();
        assert_eq!(s.n(), 9);
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        assert!(LatentSpace::Circle { radius: 0.0 }.validate().is_err());
        assert!(LatentSpace::FlatTorusRhombus { r1: [1.0, 1.0], r2: [2.0, 2.0] }.validate().is_err());
        assert!(LatentSpace::EmbeddedTorus3D { major: 1.0, minor: 2.0 }.validate().is_err());
        assert!(sample_latent(&LatentSpace::Circle { radius: 1.0 }, 0, SamplingScheme::UniformGrid, 0).is_err());
        assert!(sample_latent(&LatentSpace::CustomPointSet { dim: 2 }, 3, SamplingScheme::UniformGrid, 0).is_err());
    }

    #[test]
    fn torus3d_samples_lie_on_torus() {
        let space = LatentSpace::EmbeddedTorus3D { major: 2.5, minor: 1.0 };
        let s = sample_latent(&space, 50, SamplingScheme::UniformRandom, 3).unwrap();
        assert!(s.points.rows_iter().all(|z| space.contains(z)));
    }
}
