use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::HarnessError;
use crate::homology::{Scaling, DEFAULT_RATIO_THRESHOLD};
use crate::model::{Family, SamplingScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    ToyCircle,
    ConcentrationRate,
    PersistenceConsistency,
    TorusIsometry,
    ExternalData,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ToyCircle => "toy_circle",
            Experiment::ConcentrationRate => "concentration_rate",
            Experiment::PersistenceConsistency => "persistence_consistency",
            Experiment::TorusIsometry => "torus_isometry",
            Experiment::ExternalData => "external_data",
        }
    }
}

/// Latent manifold used by the persistence-consistency pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Circle,
    Torus,
}

/// Flat experiment configuration. Every field has a per-experiment default;
/// a JSON file only needs the keys it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Replicates; replicate `s` uses seed `seed + s`.
    pub seeds: usize,
    /// Latent sample size (fixed n of the rate study).
    pub n: usize,
    pub p_values: Vec<usize>,
    pub sigma_sq: f64,
    pub coef_family: Family,
    pub noise_family: Family,
    pub sampling: SamplingScheme,
    /// Sample sizes of the rate study's n-sweep, run at `sweep_p`.
    pub n_values: Vec<usize>,
    pub sweep_p: usize,
    pub manifold: Manifold,
    pub homology: bool,
    /// Points kept (seeded uniform subsample) before Rips persistence.
    pub n_sub: usize,
    pub max_dim: usize,
    /// Rips truncation; the enclosing radius when absent.
    pub max_edge: Option<f64>,
    pub ratio_threshold: f64,
    pub simplex_budget: usize,
    pub scaling: Scaling,
    /// k-NN neighbours; `0` selects the smallest connected k.
    pub k: usize,
    pub smooth: bool,
    pub k_smooth: usize,
    pub r1: Option<[f64; 2]>,
    pub r2: Option<[f64; 2]>,
    /// `R/r` ratios of the embedded-torus metric (minor radius 1).
    pub torus_ratios: Vec<f64>,
    /// Also compute teleport geodesics on the explicit 9-copy tiling.
    pub retessellate: bool,
    /// Pair budget of the isometry regression; sources are subsampled when
    /// all pairs would exceed it.
    pub max_pairs: usize,
    pub y_path: Option<PathBuf>,
    pub xi_path: Option<PathBuf>,
    pub top_active: Option<usize>,
    pub pca_dims: Option<usize>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            seed: 0,
            seeds: 1,
            n: 1000,
            p_values: vec![200],
            sigma_sq: 0.02,
            coef_family: Family::Gaussian,
            noise_family: Family::Gaussian,
            sampling: SamplingScheme::UniformGrid,
            n_values: Vec::new(),
            sweep_p: 256,
            manifold: Manifold::Circle,
            homology: true,
            n_sub: 300,
            max_dim: 1,
            max_edge: None,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            simplex_budget: crate::homology::DEFAULT_SIMPLEX_BUDGET,
            scaling: Scaling::InvSqrtP,
            k: 10,
            smooth: false,
            k_smooth: crate::geodesic::DEFAULT_SMOOTHING_NEIGHBORS,
            r1: None,
            r2: None,
            torus_ratios: vec![1.5, 2.0, 2.5],
            retessellate: false,
            max_pairs: 1_000_000,
            y_path: None,
            xi_path: None,
            top_active: None,
            pca_dims: None,
        };
        match experiment {
            Experiment::ToyCircle => Self { p_values: vec![3, 8, 20, 200], ..base },
            Experiment::ConcentrationRate => Self {
                n: 100,
                p_values: vec![64, 128, 256, 512, 1024],
                seeds: 10,
                n_values: vec![50, 100, 200, 400, 800],
                homology: false,
                ..base
            },
            Experiment::PersistenceConsistency => Self {
                n: 300,
                p_values: vec![25, 100, 400],
                seeds: 10,
                sigma_sq: 0.0,
                ..base
            },
            Experiment::TorusIsometry => Self {
                max_dim: 2,
                manifold: Manifold::Torus,
                sampling: SamplingScheme::UniformRandom,
                r1: Some([1.0, 0.0]),
                r2: Some([0.0, 1.0]),
                ..base
            },
            Experiment::ExternalData => Self {
                n: 0,
                p_values: Vec::new(),
                sigma_sq: 0.0,
                homology: false,
                max_dim: 2,
                scaling: Scaling::SelfNormalized,
                smooth: true,
                torus_ratios: Vec::new(),
                ..base
            },
        }
    }

    /// Parses a flat JSON object over the defaults of its experiment.
    /// `experiment` may be omitted when `fallback` names one.
    pub fn from_json(text: &str, fallback: Option<Experiment>) -> Result<Self, HarnessError> {
        let value: Value = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let Value::Object(user) = value else {
            return Err(HarnessError::Config("configuration must be a JSON object".into()));
        };
        if let Some((key, _)) = user.iter().find(|(_, v)| matches!(v, Value::Object(_))) {
            return Err(HarnessError::Config(format!("key {key:?}: nested objects are not allowed")));
        }
        let experiment = match (user.get("experiment"), fallback) {
            (Some(v), fallback) => {
                let e: Experiment =
                    serde_json::from_value(v.clone()).map_err(|e| HarnessError::Config(format!("experiment: {e}")))?;
                if let Some(f) = fallback.filter(|f| *f != e) {
                    return Err(HarnessError::Config(format!(
                        "configuration is for {} but {} was requested",
                        e.name(),
                        f.name()
                    )));
                }
                e
            }
            (None, Some(f)) => f,
            (None, None) => return Err(HarnessError::Config("missing \"experiment\" key".into())),
        };
        let Value::Object(mut merged) = serde_json::to_value(Self::defaults(experiment))? else {
            unreachable!("config serialises to an object")
        };
        merge(&mut merged, user);
        let cfg: Self = serde_json::from_value(Value::Object(merged)).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.seeds == 0 {
            return bad("seeds must be positive".into());
        }
        if !(self.sigma_sq >= 0.0 && self.sigma_sq.is_finite()) {
            return bad(format!("sigma_sq must be finite and ≥ 0, got {}", self.sigma_sq));
        }
        if !(self.ratio_threshold > 1.0) {
            return bad(format!("ratio_threshold must exceed 1, got {}", self.ratio_threshold));
        }
        if self.max_dim > 2 {
            return bad(format!("max_dim must be at most 2, got {}", self.max_dim));
        }
        if self.n_sub == 0 || self.k_smooth < 2 || self.max_pairs == 0 || self.simplex_budget == 0 {
            return bad("n_sub, max_pairs and simplex_budget must be positive and k_smooth ≥ 2".into());
        }
        if let Some(t) = self.max_edge.filter(|t| !(*t > 0.0)) {
            return bad(format!("max_edge must be positive, got {t}"));
        }
        if self.torus_ratios.iter().any(|r| !(*r > 1.0 && r.is_finite())) {
            return bad("torus ratios R/r must exceed 1".into());
        }
        if self.r1.is_some() != self.r2.is_some() {
            return bad("r1 and r2 must be given together".into());
        }
        if self.p_values.iter().any(|&p| p == 0) {
            return bad("p values must be positive".into());
        }
        match self.experiment {
            Experiment::ExternalData => {
                let empty = |p: &Option<PathBuf>| p.as_ref().is_none_or(|p| p.as_os_str().is_empty());
                if empty(&self.y_path) || empty(&self.xi_path) {
                    return bad("external data needs y_path and xi_path".into());
                }
            }
            _ => {
                if self.n == 0 {
                    return bad("n must be positive".into());
                }
                if self.p_values.is_empty() {
                    return bad("p_values must not be empty".into());
                }
            }
        }
        Ok(())
    }
}

fn merge(into: &mut Map<String, Value>, from: Map<String, Value>) {
    for (k, v) in from {
        // Unknown keys are kept so that deserialisation rejects them.
        into.insert(k, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "toy_circle", "seed": 7}"#, None).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.p_values, vec![3, 8, 20, 200]);
        let round = ExperimentConfig::from_json(&cfg.to_json(), None).unwrap();
        assert_eq!(round, cfg);
    }

    #[test]
    fn rejections() {
        for text in [
            r#"{"experiment": "toy_circle", "bogus": 1}"#,
            r#"{"experiment": "toy_circle", "seeds": 0}"#,
            r#"{"experiment": "toy_circle", "nested": {"a": 1}}"#,
            r#"{"experiment": "external_data"}"#,
            r#"{"seed": 1}"#,
            r#"[1, 2]"#,
        ] {
            assert!(ExperimentConfig::from_json(text, None).is_err(), "{text}");
        }
        assert!(ExperimentConfig::from_json(r#"{"experiment": "toy_circle"}"#, Some(Experiment::TorusIsometry)).is_err());
        assert!(ExperimentConfig::from_json("{}", Some(Experiment::TorusIsometry)).is_ok());
    }
}
