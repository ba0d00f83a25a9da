use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DataMatrix, FeatureMap, LatentSample, ModelError};

/// Zero-mean, unit-variance sub-Gaussian law used for coefficients and noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Gaussian,
    Rademacher,
}

impl Family {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Family::Gaussian => rng.sample(StandardNormal),
            Family::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Rule giving `Σ(z)`; constant in `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// `Σ = c·I_p`.
    IdentityScaled(f64),
    /// `Σ = diag(spectrum)`, one entry per ambient coordinate.
    Diagonal(Vec<f64>),
}

impl SigmaRule {
    fn validate(&self, p: usize) -> Result<(), ModelError> {
        match self {
            SigmaRule::IdentityScaled(c) if !(*c >= 0.0 && c.is_finite()) => Err(ModelError::InvalidArgument(
                format!("identity scale must be ≥ 0, got {c}"),
            )),
            SigmaRule::Diagonal(s) if s.len() != p => Err(ModelError::Shape(format!(
                "diagonal spectrum has {} entries, p = {p}",
                s.len()
            ))),
            SigmaRule::Diagonal(s) if s.iter().any(|v| !(*v >= 0.0 && v.is_finite())) => Err(
                ModelError::InvalidArgument("spectrum entries must be finite and ≥ 0".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Eigenvalues of `Σ` as a length-`p` vector.
    pub fn spectrum(&self, p: usize) -> Vec<f64> {
        match self {
            SigmaRule::IdentityScaled(c) => vec![*c; p],
            SigmaRule::Diagonal(s) => s.clone(),
        }
    }

    pub fn trace(&self, p: usize) -> f64 {
        match self {
            SigmaRule::IdentityScaled(c) => c * p as f64,
            SigmaRule::Diagonal(s) => s.iter().sum(),
        }
    }
}

pub type MeanFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Rule giving `μ(z)`.
#[derive(Clone, Default)]
pub enum MuRule {
    #[default]
    Zero,
    Constant(Vec<f64>),
    Custom(MeanFn),
}

impl fmt::Debug for MuRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuRule::Zero => f.write_str("Zero"),
            MuRule::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            MuRule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl MuRule {
    fn eval(&self, z: &[f64], p: usize) -> Result<Option<Vec<f64>>, ModelError> {
        let v = match self {
            MuRule::Zero => return Ok(None),
            MuRule::Constant(v) => v.clone(),
            MuRule::Custom(f) => f(z),
        };
        if v.len() != p || v.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::Shape(format!("μ(z) must be a finite {p}-vector")));
        }
        Ok(Some(v))
    }
}

/// Full generative description of `Y_i = Σ^{1/2} X(z_i) + μ(z_i) + σ E_i`.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub feature_map: FeatureMap,
    /// Ambient dimension.
    pub p: usize,
    /// Noise scale `σ ≥ 0`.
    pub sigma: f64,
    pub sigma_rule: SigmaRule,
    pub mu_rule: MuRule,
    pub noise_family: Family,
    pub coef_family: Family,
    /// Sub-Gaussian norm bound; metadata for the tail-bound evaluator.
    pub k_bound: f64,
    pub seed: u64,
    /// Reject latent points where `kernel(z, z)/p ≠ 1` under `Σ = I_p`.
    pub strict_unit_variance: bool,
}

impl ModelSpec {
    /// Identity covariance, zero mean, Gaussian coefficients and noise.
    pub fn new(feature_map: FeatureMap, sigma: f64, seed: u64) -> Self {
        let p = feature_map.scale();
        Self {
            feature_map,
            p,
            sigma,
            sigma_rule: SigmaRule::IdentityScaled(1.0),
            mu_rule: MuRule::Zero,
            noise_family: Family::Gaussian,
            coef_family: Family::Gaussian,
            k_bound: 1.0,
            seed,
            strict_unit_variance: false,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(ModelError::InvalidArgument(format!("σ must be ≥ 0, got {}", self.sigma)));
        }
        if self.p < self.feature_map.rank() {
            return Err(ModelError::RankExceedsDimension {
                rank: self.feature_map.rank(),
                p: self.p,
            });
        }
        self.sigma_rule.validate(self.p)
    }
}

/// Draws the data matrix `Y` for the latent sample.
///
/// Each random function is `X_j(z) = Σ_k g_jk φ_k(z) / √p` with i.i.d.
/// coefficients `g_jk` from `coef_family`, so
/// `E[X_j(z) X_j(z′)] = φ(z)·φ(z′)/p`. Coefficients come from stream 0 of a
/// ChaCha generator keyed by `spec.seed` and the noise of row `i` from
/// stream `i + 1`, so the output does not depend on how rows are scheduled.
pub fn sample_data(spec: &ModelSpec, latent: &LatentSample) -> Result<DataMatrix, ModelError> {
    spec.validate()?;
    let p = spec.p;
    let r = spec.feature_map.rank();
    let n = latent.n();
    if n == 0 {
        return Ok(DataMatrix::zeros(0, p));
    }
    let phis = latent
        .points
        .rows_iter()
        .map(|z| spec.feature_map.eval(z))
        .collect::<Result<Vec<_>, _>>()?;
    if spec.strict_unit_variance && spec.sigma_rule == SigmaRule::IdentityScaled(1.0) {
        for (i, phi) in phis.iter().enumerate() {
            let v = phi.iter().map(|x| x * x).sum::<f64>() / spec.feature_map.scale() as f64;
            if (v - 1.0).abs() > 1e-9 {
                return Err(ModelError::UnitVarianceViolated { index: i, variance: v });
            }
        }
    }

    let mut coef_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    coef_rng.set_stream(0);
    let coefs: Vec<f64> = (0..p * r).map(|_| spec.coef_family.draw(&mut coef_rng)).collect();
    let root_sigma: Vec<f64> = spec.sigma_rule.spectrum(p).iter().map(|s| s.sqrt()).collect();
    let inv_sqrt_p = 1.0 / (p as f64).sqrt();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let phi = &phis[i];
            let mu = spec.mu_rule.eval(latent.point(i), p)?;
            let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
            noise_rng.set_stream(i as u64 + 1);
            let mut y = Vec::with_capacity(p);
            for j in 0..p {
                let g = &coefs[j * r..(j + 1) * r];
                let x: f64 = g.iter().zip(phi).map(|(a, b)| a * b).sum::<f64>() * inv_sqrt_p;
                let mut v = root_sigma[j] * x;
                if let Some(mu) = &mu {
                    v += mu[j];
                }
                v += spec.sigma * spec.noise_family.draw(&mut noise_rng);
                y.push(v);
            }
            Ok(y)
        })
        .collect::<Result<_, ModelError>>()?;
    let mut data = DataMatrix::from_rows(&rows)?;
    data.row_meta = Some((0..n).collect());
    Ok(data)
}

/// Noise-free expected Gram matrix `E[Y^nf(z_i)·Y^nf(z_j)]`, i.e.
/// `(tr Σ / p) φ(z_i)·φ(z_j) + μ(z_i)·μ(z_j)`. Equals `φ(z_i)·φ(z_j)` for
/// `Σ = I_p`, `μ = 0`.
pub fn noise_free_gram(spec: &ModelSpec, latent: &LatentSample) -> Result<DMatrix<f64>, ModelError> {
    spec.validate()?;
    let n = latent.n();
    let p = spec.p;
    let phis = spec.feature_map.feature_matrix(latent)?;
    let mus = latent
        .points
        .rows_iter()
        .map(|z| spec.mu_rule.eval(z, p))
        .collect::<Result<Vec<_>, _>>()?;
    let factor = spec.sigma_rule.trace(p) / p as f64;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut v = factor * super::data::dot(phis.row(i), phis.row(j));
            if let (Some(a), Some(b)) = (&mus[i], &mus[j]) {
                v += super::data::dot(a, b);
            }
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_feature_map, sample_latent, FeatureMapRequest, LatentSpace, SamplingScheme};

    fn toy_spec(p: usize, sigma: f64, seed: u64) -> ModelSpec {
        ModelSpec::new(make_feature_map(FeatureMapRequest::ToyCircle { p }).unwrap(), sigma, seed)
    }

    fn circle(n: usize) -> LatentSample {
        sample_latent(&LatentSpace::Circle { radius: 1.0 }, n, SamplingScheme::UniformGrid, 0).unwrap()
    }

    #[test]
    fn bit_identical_for_same_seed() {
        let latent = circle(20);
        let a = sample_data(&toy_spec(30, 0.1, 5), &latent).unwrap();
        let b = sample_data(&toy_spec(30, 0.1, 5), &latent).unwrap();
        let c = sample_data(&toy_spec(30, 0.1, 6), &latent).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let latent = circle(64);
        let spec = toy_spec(40, 0.2, 11);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_data(&spec, &latent)).unwrap();
        let b = four.install(|| sample_data(&spec, &latent)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_latent_gives_empty_matrix() {
        let fm = make_feature_map(FeatureMapRequest::ToyCircle { p: 5 }).unwrap();
        let latent = LatentSample::from_points(LatentSpace::Circle { radius: 1.0 }, DataMatrix::zeros(0, 2)).unwrap();
        let y = sample_data(&ModelSpec::new(fm, 0.0, 1), &latent).unwrap();
        assert_eq!((y.nrows(), y.ncols()), (0, 5));
    }

    #[test]
    fn strict_unit_variance_rejects_toy_circle() {
        let mut spec = toy_spec(10, 0.0, 1);
        spec.strict_unit_variance = true;
        assert!(matches!(
            sample_data(&spec, &circle(8)),
            Err(ModelError::UnitVarianceViolated { .. })
        ));
        let torus = make_feature_map(FeatureMapRequest::TorusFourier { p: 10 }).unwrap();
        let mut spec = ModelSpec::new(torus, 0.0, 1);
        spec.strict_unit_variance = true;
        let angles = DataMatrix::from_rows(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        let latent = LatentSample::from_points(LatentSpace::CustomPointSet { dim: 2 }, angles).unwrap();
        assert!(sample_data(&spec, &latent).is_ok());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = toy_spec(10, -1.0, 1);
        assert!(spec.validate().is_err());
        spec.sigma = 0.0;
        spec.sigma_rule = SigmaRule::Diagonal(vec![1.0; 3]);
        assert!(spec.validate().is_err());
        spec.sigma_rule = SigmaRule::Diagonal(vec![-1.0; 10]);
        assert!(spec.validate().is_err());
        spec.sigma_rule = SigmaRule::IdentityScaled(1.0);
        spec.p = 2;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn noise_free_gram_is_feature_gram_for_identity() {
        let latent = circle(6);
        let spec = toy_spec(12, 0.3, 0);
        let g = noise_free_gram(&spec, &latent).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let k = crate::model::evaluate_kernel(&spec.feature_map, latent.point(i), latent.point(j)).unwrap();
                assert!((g[(i, j)] - k).abs() < 1e-12);
            }
        }
    }
}
