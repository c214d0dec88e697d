//! Scenario runner: config in, CSV and report out.
//!
//! Each scenario writes `<scenario>.csv` (17 significant digits) and
//! `<scenario>.report.txt` (flat `key = value`) into the output directory.

mod config;
mod report;
mod scenarios;
pub mod tolerances;

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{ConfigError, Hbar, RunConfig, Scenario, KEYS};
pub use report::{Check, Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("t_max = {t_max} exceeds the recurrence guard {limit:.6} (= 0.5 * 2pi/delta_omega)")]
    Guard { t_max: f64, limit: f64 },
    #[error("cannot write output: {0}")]
    Io(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Guard { .. } => 3,
            RunError::Compute(_) => 1,
        }
    }
}

/// Files written by one run and the verdicts they record.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: Report,
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.pass() {
            0
        } else {
            1
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let out = match cfg.scenario {
        Scenario::Canonical => scenarios::canonical(cfg),
        Scenario::Variance => scenarios::variance(cfg),
        Scenario::Correlation => scenarios::correlation(cfg),
        Scenario::FdtDrift => scenarios::fdt_drift(cfg),
        Scenario::NonMarkovian => scenarios::nonmarkovian(cfg),
        Scenario::StarAlgebra => scenarios::star_algebra(cfg),
    }?;
    let report = Report {
        scenario: cfg.scenario.to_string(),
        parameters: cfg.to_pairs(),
        flags: out.flags,
        checks: out.checks,
    };
    fs::create_dir_all(&cfg.out_dir).map_err(|e| RunError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    let csv_path = cfg.out_dir.join(format!("{}.csv", cfg.scenario));
    let report_path = cfg.out_dir.join(format!("{}.report.txt", cfg.scenario));
    let io = |p: &PathBuf, e: std::io::Error| RunError::Io(format!("{}: {e}", p.display()));
    let file = fs::File::create(&csv_path).map_err(|e| io(&csv_path, e))?;
    out.series.write_csv(std::io::BufWriter::new(file)).map_err(|e| io(&csv_path, e))?;
    fs::write(&report_path, report.render()).map_err(|e| io(&report_path, e))?;
    Ok(RunOutcome { report, csv_path, report_path })
}

/// Star-product identities plus the `K` identity on the default bath.
pub fn selftest() -> Result<Vec<Check>, RunError> {
    let cfg = RunConfig::defaults(Scenario::Correlation);
    let (_, mut checks) = scenarios::star_identities(1.0, cfg.seed, tolerances::STAR_TRIALS);
    let spec = scenarios::bath(&cfg)?;
    checks.push(scenarios::k_action_check(&spec, cfg.t_max, cfg.seed));
    Ok(checks)
}
