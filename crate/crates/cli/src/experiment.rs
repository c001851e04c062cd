//! The weak-measurement protocol: synthetic shot data and the λ² fit.

use std::path::{Path, PathBuf};

use serde::Serialize;

use ftmeas_core::experiment::{fit_lambda_squared, synthesize_experiment, BSample};

use crate::config::{ExperimentSection, RunConfig};
use crate::error::{CliError, Result};
use crate::output;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub lambda_sq_true: f64,
    pub lambda_sq_hat: f64,
    pub stderr: f64,
    pub points: usize,
    pub shots: u64,
    pub seed: u64,
    pub theta: f64,
    #[serde(skip)]
    pub csv: PathBuf,
    #[serde(skip)]
    pub samples: Vec<BSample>,
}

impl ExperimentReport {
    /// |λ̂² − λ²| in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.lambda_sq_hat - self.lambda_sq_true).abs() / self.stderr
    }
}

fn section(cfg: &RunConfig) -> Result<&ExperimentSection> {
    cfg.experiment
        .as_ref()
        .ok_or_else(|| CliError::validation("experiment", "the [experiment] section is required"))
}

pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    let e = section(cfg)?;
    let rho0 = e.rho0()?;
    let samples = synthesize_experiment(e.lambda, e.theta, &rho0, &e.tau_grid(), e.shots, e.seed)
        .map_err(|err| CliError::validation("experiment.theta", err.to_string()))?;
    let (lambda_sq_hat, stderr) = fit_lambda_squared(&samples).map_err(|source| CliError::Solver {
        run: "experiment".into(),
        source,
    })?;
    let dir = Path::new(&cfg.output.dir);
    output::ensure_dir(dir)?;
    let csv = dir.join(format!("{}_bsamples.csv", cfg.output.prefix));
    output::write_bsamples(&csv, &samples)?;
    let report = ExperimentReport {
        lambda_sq_true: e.lambda * e.lambda,
        lambda_sq_hat,
        stderr,
        points: samples.len(),
        shots: e.shots,
        seed: e.seed,
        theta: e.theta,
        csv,
        samples,
    };
    output::write_json(&output::sidecar_path(&report.csv), &report)?;
    Ok(report)
}
