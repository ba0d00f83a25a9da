use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use super::{DataMatrix, LatentSample, ModelError};

pub type FeatureFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Which closed-form map a [`FeatureMap`] evaluates.
#[derive(Clone)]
pub enum FeatureMapKind {
    /// Circle example: `φ(z) = √p [z1, (2/π) sin(πz2/2), (2/π) cos(πz2/2)]`
    /// on unit-circle points `z = (z1, z2)`. Rank 3.
    ToyCircle,
    /// Clifford torus: `φ(θ) = √(p/2) [cos θ1, sin θ1, cos θ2, sin θ2]` on
    /// angle pairs. Rank 4, `‖φ‖² = p`.
    TorusFourier,
    /// User-supplied map of fixed rank, evaluated on points of dimension
    /// `input_dim`.
    Custom {
        name: String,
        input_dim: usize,
        func: FeatureFn,
    },
}

impl fmt::Debug for FeatureMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureMapKind::ToyCircle => f.write_str("ToyCircle"),
            FeatureMapKind::TorusFourier => f.write_str("TorusFourier"),
            FeatureMapKind::Custom { name, input_dim, .. } => {
                write!(f, "Custom({name}, input_dim={input_dim})")
            }
        }
    }
}

/// Request accepted by [`make_feature_map`].
#[derive(Clone)]
pub enum FeatureMapRequest {
    ToyCircle { p: usize },
    TorusFourier { p: usize },
    Custom {
        name: String,
        rank: usize,
        input_dim: usize,
        p: usize,
        func: FeatureFn,
    },
}

/// Finite-rank feature map `φ: Z → R^r` whose dot products give the kernel
/// `E[Y^nf(z)·Y^nf(z′)]`.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    kind: FeatureMapKind,
    rank: usize,
    scale: usize,
    /// Multiplies component `k` of `φ`; all ones for the closed forms.
    weights: Vec<f64>,
}

pub fn make_feature_map(request: FeatureMapRequest) -> Result<FeatureMap, ModelError> {
    let (kind, rank, p) = match request {
        FeatureMapRequest::ToyCircle { p } => (FeatureMapKind::ToyCircle, 3, p),
        FeatureMapRequest::TorusFourier { p } => (FeatureMapKind::TorusFourier, 4, p),
        FeatureMapRequest::Custom {
            name,
            rank,
            input_dim,
            p,
            func,
        } => {
            if rank == 0 || input_dim == 0 {
                return Err(ModelError::InvalidArgument(
                    "custom feature map needs rank ≥ 1 and input_dim ≥ 1".into(),
                ));
            }
            (FeatureMapKind::Custom { name, input_dim, func }, rank, p)
        }
    };
    if p < rank {
        return Err(ModelError::RankExceedsDimension { rank, p });
    }
    Ok(FeatureMap {
        kind,
        rank,
        scale: p,
        weights: vec![1.0; rank],
    })
}

impl FeatureMap {
    /// Correlation rank `r`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The `p` appearing in the `√p` normalisation.
    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn kind(&self) -> &FeatureMapKind {
        &self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, ModelError> {
        if weights.len() != self.rank || weights.iter().any(|w| !w.is_finite()) {
            return Err(ModelError::InvalidArgument(format!(
                "expected {} finite weights, got {}",
                self.rank,
                weights.len()
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn input_dim(&self) -> usize {
        match &self.kind {
            FeatureMapKind::ToyCircle | FeatureMapKind::TorusFourier => 2,
            FeatureMapKind::Custom { input_dim, .. } => *input_dim,
        }
    }

    fn check_domain(&self, z: &[f64]) -> Result<(), ModelError> {
        if z.len() != self.input_dim() || z.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::DomainMismatch(format!(
                "{:?} expects finite {}-vectors, got {:?}",
                self.kind,
                self.input_dim(),
                z
            )));
        }
        Ok(())
    }

    /// `φ(z)`.
    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_domain(z)?;
        let p = self.scale as f64;
        let mut phi = match &self.kind {
            FeatureMapKind::ToyCircle => {
                let c = 2.0 / PI;
                let s = p.sqrt();
                vec![s * z[0], s * c * (FRAC_PI_2 * z[1]).sin(), s * c * (FRAC_PI_2 * z[1]).cos()]
            }
            FeatureMapKind::TorusFourier => {
                let s = (0.5 * p).sqrt();
                vec![s * z[0].cos(), s * z[0].sin(), s * z[1].cos(), s * z[1].sin()]
            }
            FeatureMapKind::Custom { func, .. } => {
                let v = func(z);
                if v.len() != self.rank || v.iter().any(|x| !x.is_finite()) {
                    return Err(ModelError::DomainMismatch(format!(
                        "custom map returned {} values (rank {})",
                        v.len(),
                        self.rank
                    )));
                }
                v
            }
        };
        for (x, w) in phi.iter_mut().zip(&self.weights) {
            *x *= w;
        }
        Ok(phi)
    }

    /// `n × r` matrix with rows `φ(z_i)`.
    pub fn feature_matrix(&self, latent: &LatentSample) -> Result<DataMatrix, ModelError> {
        let rows = latent
            .points
            .rows_iter()
            .map(|z| self.eval(z))
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Ok(DataMatrix::zeros(0, self.rank));
        }
        DataMatrix::from_rows(&rows)
    }

    fn unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// `φ(z)·φ(z′)`.
///
/// The built-in maps use their closed-form kernels:
/// `p[z1 z1′ + (4/π²) cos((z2 − z2′)π/2)]` for the circle example and
/// `(p/2)[cos(θ1 − θ1′) + cos(θ2 − θ2′)]` for the Clifford torus. Custom or
/// reweighted maps fall back to the explicit sum `Σ_k φ_k(z) φ_k(z′)`.
pub fn evaluate_kernel(fm: &FeatureMap, z: &[f64], z_prime: &[f64]) -> Result<f64, ModelError> {
    fm.check_domain(z)?;
    fm.check_domain(z_prime)?;
    let p = fm.scale as f64;
    if fm.unit_weights() {
        match fm.kind {
            FeatureMapKind::ToyCircle => {
                let c = 4.0 / (PI * PI);
                return Ok(p * (z[0] * z_prime[0] + c * ((z[1] - z_prime[1]) * FRAC_PI_2).cos()));
            }
            FeatureMapKind::TorusFourier => {
                return Ok(0.5 * p * ((z[0] - z_prime[0]).cos() + (z[1] - z_prime[1]).cos()));
            }
            FeatureMapKind::Custom { .. } => {}
        }
    }
    let a = fm.eval(z)?;
    let b = fm.eval(z_prime)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x * y).sum())
}
