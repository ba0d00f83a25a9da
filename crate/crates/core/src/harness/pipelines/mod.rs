mod external;
mod persistence;
mod rate;
mod torus;
mod toy;

use std::path::Path;
use std::time::Instant;

use serde_json::Value;

use super::{ArtifactWriter, Check, Experiment, ExperimentConfig, ExperimentReport, HarnessError, ManifestEntry, REPORT_FILE};

/// Wall-clock times per stage; not listed in the manifest.
pub const TIMINGS_FILE: &str = "timings.json";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ExperimentReport,
    pub manifest: Vec<ManifestEntry>,
}

/// Shared state of a pipeline run.
pub(crate) struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub writer: ArtifactWriter,
    pub checks: Vec<Check>,
    pub units: Vec<String>,
    pub seeds_used: Vec<u64>,
    timings: Vec<(String, f64)>,
}

impl Context<'_> {
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T, HarnessError>) -> Result<T, HarnessError> {
        let start = Instant::now();
        let out = f(self);
        self.timings.push((name.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

/// Runs the pipeline named by `cfg.experiment`, writing every artifact, the
/// report and the manifest under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let mut ctx = Context {
        cfg,
        writer: ArtifactWriter::new(out_dir)?,
        checks: Vec::new(),
        units: Vec::new(),
        seeds_used: Vec::new(),
        timings: Vec::new(),
    };
    let results: Value = match cfg.experiment {
        Experiment::ToyCircle => toy::run(&mut ctx)?,
        Experiment::ConcentrationRate => rate::run(&mut ctx)?,
        Experiment::PersistenceConsistency => persistence::run(&mut ctx)?,
        Experiment::TorusIsometry => torus::run(&mut ctx)?,
        Experiment::ExternalData => external::run(&mut ctx)?,
    };
    let mut artifacts: Vec<String> = ctx.writer_paths();
    artifacts.sort();
    let report = ExperimentReport {
        experiment: cfg.experiment,
        version: crate::VERSION.to_string(),
        config: cfg.clone(),
        seeds_used: ctx.seeds_used.clone(),
        units: ctx.units.clone(),
        results,
        checks: ctx.checks.clone(),
        artifacts,
        timings_file: TIMINGS_FILE.to_string(),
    };
    ctx.writer.write_json(REPORT_FILE, &report)?;
    let timings: serde_json::Map<String, Value> =
        ctx.timings.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
    let mut text = serde_json::to_string_pretty(&timings)?;
    text.push('\n');
    ctx.writer.write_unlisted(TIMINGS_FILE, text.as_bytes())?;
    let manifest = ctx.writer.finish()?;
    Ok(RunOutcome { report, manifest })
}

impl Context<'_> {
    fn writer_paths(&self) -> Vec<String> {
        self.writer.paths()
    }
}

fn with_experiment(cfg: &ExperimentConfig, experiment: Experiment) -> Result<ExperimentConfig, HarnessError> {
    if cfg.experiment != experiment {
        return Err(HarnessError::Config(format!(
            "configuration is for {} but {} was requested",
            cfg.experiment.name(),
            experiment.name()
        )));
    }
    Ok(cfg.clone())
}

/// Fraction formatted as `k/n`.
pub(crate) fn tally(flags: &[bool]) -> (usize, String) {
    let k = flags.iter().filter(|&&f| f).count();
    (k, format!("{k}/{}", flags.len()))
}

/// Toy circle: deviation decay in p, rank-3 SVD coordinates, Rips diagram
/// and Betti estimate per p.
pub fn run_toy_circle(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    run_experiment(&with_experiment(cfg, Experiment::ToyCircle)?, out_dir)
}

/// Rate studies: i.i.d. Gaussian and Rademacher, the toy circle, and an
/// n-sweep at fixed p.
pub fn run_concentration_rate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    run_experiment(&with_experiment(cfg, Experiment::ConcentrationRate)?, out_dir)
}

/// Bottleneck distances between diagrams of the data and of the noise-free
/// manifold sample, checked against the Gromov-Hausdorff chain.
pub fn run_persistence_consistency(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    run_experiment(&with_experiment(cfg, Experiment::PersistenceConsistency)?, out_dir)
}

/// Clifford-torus synthetic: Betti check and isometry regressions under the
/// rhombus, teleport and embedded-torus metrics.
pub fn run_torus_isometry(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    run_experiment(&with_experiment(cfg, Experiment::TorusIsometry)?, out_dir)
}

/// Observed data `Y` with physical positions `ξ` read from CSV files.
pub fn run_external(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    run_experiment(&with_experiment(cfg, Experiment::ExternalData)?, out_dir)
}
