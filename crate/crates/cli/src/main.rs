use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use rfgeom::harness::{run_experiment, Experiment, ExperimentConfig, HarnessError, RunOutcome, MANIFEST_FILE};

#[derive(Parser)]
#[command(name = "rfgeom", version, about = "Random function model experiments: concentration, persistence and geodesic isometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Toy circle: deviation decay, rank-3 SVD coordinates and Betti numbers.
    ToyCircle(Common),
    /// Concentration rate studies over (n, p) grids.
    ConcRate(Common),
    /// Bottleneck distances against the Gromov-Hausdorff chain.
    Persistence(Common),
    /// Clifford-torus synthetic isometry regressions.
    TorusIsometry(Common),
    /// Observed data Y with positions ξ read from CSV.
    External(ExternalArgs),
}

#[derive(Args)]
struct Common {
    /// Flat JSON configuration; keys override the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving every artifact and the manifest.
    #[arg(long)]
    out_dir: PathBuf,
    /// Base seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ExternalArgs {
    #[command(flatten)]
    common: Common,
    /// CSV of observations, one row per point.
    #[arg(long)]
    y: Option<PathBuf>,
    /// CSV of physical positions, two columns.
    #[arg(long)]
    xi: Option<PathBuf>,
    /// PCA dimension applied before persistent homology.
    #[arg(long)]
    pca_dims: Option<usize>,
    /// Keep only this many rows with the largest mean.
    #[arg(long)]
    top_active: Option<usize>,
}

enum Failure {
    /// Bad input, I/O, or a computation that could not finish: exit 1.
    Error(anyhow::Error),
    /// The run finished but hard checks failed: exit 2.
    Checks(Vec<String>),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Error(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("failed hard checks: {}", names.join(", "));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (experiment, common, external) = match cli.command {
        Command::ToyCircle(c) => (Experiment::ToyCircle, c, None),
        Command::ConcRate(c) => (Experiment::ConcentrationRate, c, None),
        Command::Persistence(c) => (Experiment::PersistenceConsistency, c, None),
        Command::TorusIsometry(c) => (Experiment::TorusIsometry, c, None),
        Command::External(e) => (Experiment::ExternalData, e.common, Some((e.y, e.xi, e.pca_dims, e.top_active))),
    };
    // Flags override the file: both are merged as JSON before validation.
    let text = match &common.config {
        Some(path) => fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?,
        None => "{}".to_string(),
    };
    let mut user: Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", common.config.as_deref().unwrap_or(Path::new("")).display())))?;
    let mut set = |key: &str, value: Value| {
        user.insert(key.to_string(), value);
    };
    if let Some(seed) = common.seed {
        set("seed", json!(seed));
    }
    if let Some((y, xi, pca_dims, top_active)) = external {
        for (key, value) in [("y_path", y.map(|p| json!(p))), ("xi_path", xi.map(|p| json!(p)))] {
            if let Some(v) = value {
                set(key, v);
            }
        }
        if let Some(d) = pca_dims {
            set("pca_dims", json!(d));
        }
        if let Some(m) = top_active {
            set("top_active", json!(m));
        }
    }
    let cfg = ExperimentConfig::from_json(&Value::Object(user).to_string(), Some(experiment))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Failure::Error(anyhow::anyhow!("--threads must be positive")));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .context("building the worker pool")
        .map_err(Failure::Error)?;
    let outcome: RunOutcome = pool.install(|| run_experiment(&cfg, &common.out_dir))?;

    for check in &outcome.report.checks {
        let status = if check.passed { "ok" } else if check.hard { "FAILED" } else { "warn" };
        println!("{status:>6}  {}: {}", check.name, check.detail);
    }
    println!("{} files listed in {}", outcome.manifest.len(), common.out_dir.join(MANIFEST_FILE).display());
    let failed: Vec<String> = outcome.report.failed_hard_checks().map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}
