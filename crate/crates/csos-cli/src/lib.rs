//! Batch runner for the csos identity and spectrum suites.

pub mod config;
pub mod registry;
pub mod report;
pub mod suites;

use std::path::Path;

use rayon::prelude::*;

use config::{ConfigError, ExperimentConfig, Suite};
use report::RunReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io(std::io::Error),
    Setup(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config: {e}"),
            RunError::Io(e) => write!(f, "io: {e}"),
            RunError::Setup(e) => write!(f, "setup: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(e) => e.exit_code(),
            RunError::Io(_) | RunError::Setup(_) => EXIT_USAGE,
        }
    }
}

pub fn load_config(path: &Path, only: &[Suite]) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(RunError::Io)?;
    let mut cfg = ExperimentConfig::parse(&text).map_err(RunError::Config)?;
    if !only.is_empty() {
        cfg.suites = Suite::ALL.iter().copied().filter(|s| only.contains(s)).collect();
        cfg.validate().map_err(RunError::Config)?;
    }
    Ok(cfg)
}

/// Run every selected suite on a pool of `jobs` threads; the report does not depend on `jobs`.
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Result<RunReport, RunError> {
    let shared = suites::Shared::new(cfg).map_err(|e| RunError::Setup(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let reports = pool.install(|| cfg.suites.par_iter().map(|&s| suites::run_suite(s, &shared)).collect());
    Ok(RunReport::new(cfg.clone(), reports))
}

pub fn exit_code(report: &RunReport) -> i32 {
    if report.summary.fail == 0 {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
