use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Experiment, ExperimentConfig};

pub const REPORT_FILE: &str = "report.json";

/// Outcome of one verification performed by a pipeline. Hard checks are
/// theorem-level assertions (the bottleneck chain, topology recovery);
/// soft checks track statistical expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub hard: bool,
    pub detail: String,
}

impl Check {
    pub fn hard(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, hard: true, detail }
    }

    pub fn soft(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, hard: false, detail }
    }
}

/// Self-describing record of a pipeline run. Wall-clock times live in a
/// separate file so that reports are byte-identical across reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub version: String,
    pub config: ExperimentConfig,
    /// Seeds actually used, one per replicate.
    pub seeds_used: Vec<u64>,
    pub units: Vec<String>,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Files written alongside the report, relative to the output directory.
    pub artifacts: Vec<String>,
    pub timings_file: String,
}

impl ExperimentReport {
    pub fn failed_hard_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.hard && !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
