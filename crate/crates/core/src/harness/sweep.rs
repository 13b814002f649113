use serde::{Deserialize, Serialize};

use super::{run_monte_carlo, Estimator, ExperimentConfig};
use crate::conventional::{conventional_analytic_wsmse_with, design_reuse_pilots};
use crate::error::{Error, Result};
use crate::model::{sigma2_from_snr, SystemConfig};
use crate::optimizer::{analytic_wsmse, initial_pilots, optimize_pilots, InitScheme, OptimizerTrace};

/// One (SNR, N, algorithm) point. Field names double as the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub n: usize,
    pub algorithm: String,
    pub wsmse_analytic: f64,
    pub wsmse_empirical: Option<f64>,
    pub stderr: Option<f64>,
    pub trials: Option<usize>,
    /// Optimizer sweeps, proposed rows only.
    pub sweeps: Option<usize>,
}

impl SweepRow {
    /// `|empirical − analytic|` in standard errors, if simulated.
    pub fn deviation_in_stderr(&self) -> Option<f64> {
        let emp = self.wsmse_empirical?;
        let se = self.stderr?;
        Some((emp - self.wsmse_analytic).abs() / se)
    }
}

fn point_config(exp: &ExperimentConfig, n: usize, snr_db: f64) -> SystemConfig {
    let sigma2 = sigma2_from_snr(snr_db, &exp.system.powers);
    exp.system.with_pilot_length(n).with_sigma2(sigma2)
}

fn evaluate_point(exp: &ExperimentConfig, n: usize, snr_db: f64) -> Result<Vec<SweepRow>> {
    let cfg = point_config(exp, n, snr_db);
    let mut rows = Vec::with_capacity(2);

    if exp.mode.includes_conventional() {
        let (x, reuse) = design_reuse_pilots(cfg.n, cfg.k, &cfg.powers)?;
        let analytic = conventional_analytic_wsmse_with(&cfg, &reuse, exp.receiver)?;
        let estimator = Estimator::Conventional(exp.receiver);
        let empirical = (!exp.analytic_only)
            .then(|| run_monte_carlo(&cfg, &x, estimator, exp.trials, exp.seed))
            .transpose()?;
        rows.push(SweepRow {
            snr_db,
            n: cfg.n,
            algorithm: estimator.to_string(),
            wsmse_analytic: analytic.normalized,
            wsmse_empirical: empirical.as_ref().map(|r| r.normalized),
            stderr: empirical.as_ref().and_then(|r| r.stderr),
            trials: empirical.as_ref().and_then(|r| r.trials),
            sweeps: None,
        });
    }

    if exp.mode.includes_proposed() {
        let init = initial_pilots(exp.init, &cfg, exp.seed);
        let (x, trace) = optimize_pilots(&cfg, &init, exp.tol, exp.max_sweeps)?;
        let analytic = analytic_wsmse(&x, &cfg)?;
        let empirical = (!exp.analytic_only)
            .then(|| run_monte_carlo(&cfg, &x, Estimator::Proposed, exp.trials, exp.seed))
            .transpose()?;
        rows.push(SweepRow {
            snr_db,
            n: cfg.n,
            algorithm: Estimator::Proposed.to_string(),
            wsmse_analytic: analytic.normalized,
            wsmse_empirical: empirical.as_ref().map(|r| r.normalized),
            stderr: empirical.as_ref().and_then(|r| r.stderr),
            trials: empirical.as_ref().and_then(|r| r.trials),
            sweeps: Some(trace.sweeps_completed),
        });
    }
    Ok(rows)
}

/// Normalized WSMSE against SNR at the configured pilot length.
pub fn sweep_snr(exp: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    exp.validate()?;
    let mut rows = Vec::new();
    for &snr in &exp.snr_db_list {
        rows.extend(evaluate_point(exp, exp.system.n, snr)?);
    }
    Ok(rows)
}

/// Normalized WSMSE for every (N, SNR) pair, N outermost.
pub fn sweep_pilot_length(exp: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    exp.validate()?;
    if exp.n_list.is_empty() {
        return Err(Error::Config("pilot length list is empty".into()));
    }
    if let Some(&n) = exp.n_list.iter().find(|&&n| n == 0 || n > exp.system.k) {
        return Err(Error::Config(format!(
            "pilot length {n} outside 1..={}",
            exp.system.k
        )));
    }
    let mut rows = Vec::new();
    for &n in &exp.n_list {
        for &snr in &exp.snr_db_list {
            rows.extend(evaluate_point(exp, n, snr)?);
        }
    }
    Ok(rows)
}

/// Optimizer trace from one initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRun {
    pub init: InitScheme,
    pub snr_db: f64,
    pub trace: OptimizerTrace,
}

/// Runs the optimizer from each of `inits` at one SNR.
pub fn convergence_trace(exp: &ExperimentConfig, snr_db: f64, inits: &[InitScheme]) -> Result<Vec<ConvergenceRun>> {
    exp.validate()?;
    let cfg = point_config(exp, exp.system.n, snr_db);
    inits
        .iter()
        .map(|&init| {
            let x0 = initial_pilots(init, &cfg, exp.seed);
            let (_, trace) = optimize_pilots(&cfg, &x0, exp.tol, exp.max_sweeps)?;
            Ok(ConvergenceRun { init, snr_db, trace })
        })
        .collect()
}
