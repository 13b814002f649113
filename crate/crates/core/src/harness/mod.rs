//! Monte Carlo experiment drivers.
//!
//! Trial `t` draws its channel from stream `(seed, t)` and its noise from
//! stream `(seed, t + 2³²)`, so every trial is reproducible on its own and
//! results do not depend on how trials are spread across worker threads.

mod emit;
mod sweep;

pub use emit::{
    convergence_csv, convergence_series, pilot_length_series, read_sweep_csv, snr_series, svg_line_chart, sweep_csv, write_output, OutputFormat, Series,
    CONVERGENCE_HEADER, SWEEP_HEADER,
};
pub use sweep::{convergence_trace, sweep_pilot_length, sweep_snr, ConvergenceRun, SweepRow};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conventional::{combining_matrix, Receiver, ReuseMap};
use crate::error::{Error, Result};
use crate::model::{generate_channel, generate_noise, paper_gains, received_pilot_signal, SystemConfig};
use crate::numerics::{CMatrix, RandomStream};
use crate::optimizer::{proposed_combining_matrix, InitScheme, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::pilot::PilotMatrix;
use crate::report::WsmseReport;

/// Offset between a trial's channel stream and its noise stream.
pub const NOISE_STREAM_OFFSET: u64 = 1 << 32;

/// Which estimators an experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Proposed,
    Conventional,
    Both,
}

impl Mode {
    pub fn includes_proposed(self) -> bool {
        matches!(self, Mode::Proposed | Mode::Both)
    }

    pub fn includes_conventional(self) -> bool {
        matches!(self, Mode::Conventional | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Mode::Proposed),
            "conventional" => Ok(Mode::Conventional),
            "both" => Ok(Mode::Both),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected proposed, conventional or both)"
            ))),
        }
    }
}

/// Estimator simulated by [`run_monte_carlo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Optimal combiner and MMSE receiver for the given pilots.
    Proposed,
    /// Decorrelate with the pilot matrix, then scalar shrinkage.
    Conventional(Receiver),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Proposed => f.write_str("proposed"),
            Estimator::Conventional(Receiver::Standard) => f.write_str("conventional"),
            Estimator::Conventional(Receiver::ContaminationAware) => f.write_str("conventional-aware"),
        }
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `sigma2` and `n` are overridden per sweep point.
    pub system: SystemConfig,
    pub snr_db_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    pub init: InitScheme,
    pub receiver: Receiver,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Skip the Monte Carlo and report analytic values only.
    pub analytic_only: bool,
}

/// Default SNR grid: −10 to 20 dB in 2 dB steps.
pub fn default_snr_grid() -> Vec<f64> {
    (-5..=10).map(|i| 2.0 * i as f64).collect()
}

impl ExperimentConfig {
    fn preset(m: usize, k: usize, n: usize, trials: usize) -> Self {
        let gains: Vec<f64> = paper_gains().into_iter().take(k).collect();
        ExperimentConfig {
            system: SystemConfig::uniform_power(m, n, 1.0, 1.0, gains).expect("valid preset"),
            snr_db_list: default_snr_grid(),
            n_list: (0..)
                .map(|e| 1usize << e)
                .take_while(|&v| v <= k)
                .collect(),
            trials,
            seed: 1,
            mode: Mode::Both,
            init: InitScheme::DftReuse,
            receiver: Receiver::Standard,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            analytic_only: false,
        }
    }

    /// Small, fast configuration: M=32, K=8, N=4, 5000 trials, first eight
    /// reference gains.
    pub fn desk() -> Self {
        Self::preset(32, 8, 4, 5000)
    }

    /// Reference scenario: M=128, K=32, N=16, 20000 trials, reference gains.
    pub fn paper() -> Self {
        Self::preset(128, 32, 16, 20_000)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snr_db_list.is_empty() {
            return Err(Error::Config("SNR list is empty".into()));
        }
        if let Some(s) = self.snr_db_list.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR {s} is not finite")));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("tolerance {} must be >= 0", self.tol)));
        }
        Ok(())
    }
}

/// Combining matrix `C` with `Ĥ = Y C` for the chosen estimator.
pub fn estimator_matrix(cfg: &SystemConfig, x: &PilotMatrix, estimator: Estimator) -> Result<CMatrix> {
    match estimator {
        Estimator::Proposed => proposed_combining_matrix(x, cfg),
        Estimator::Conventional(receiver) => combining_matrix(x, cfg, &ReuseMap::cyclic(cfg.n, cfg.k), receiver),
    }
}

/// Per-user weighted errors `‖ĥ_k − h_k‖²/(M g_k)` for one trial.
fn trial_errors(cfg: &SystemConfig, x: &PilotMatrix, w: &CMatrix, seed: u64, t: u64) -> Result<Vec<f64>> {
    let h = generate_channel(cfg, &mut RandomStream::new(seed, t));
    let noise = generate_noise(cfg, &mut RandomStream::new(seed, t + NOISE_STREAM_OFFSET));
    let y = received_pilot_signal(&h, x, &noise)?;
    let est = y.0.matmul(w)?;
    let mut err = vec![0.0; cfg.k];
    for i in 0..cfg.m {
        for (k, e) in err.iter_mut().enumerate() {
            *e += (est[(i, k)] - h.0[(i, k)]).norm_sqr();
        }
    }
    for (e, g) in err.iter_mut().zip(&cfg.gains) {
        *e /= cfg.m as f64 * g;
    }
    Ok(err)
}

/// Empirical normalized WSMSE of `estimator` with pilots `x`.
///
/// Runs on the current rayon pool; the result is bit-identical for any
/// number of workers.
pub fn run_monte_carlo(
    cfg: &SystemConfig,
    x: &PilotMatrix,
    estimator: Estimator,
    trials: usize,
    seed: u64,
) -> Result<WsmseReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    x.check_against(cfg)?;
    let w = estimator_matrix(cfg, x, estimator)?;

    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_errors(cfg, x, &w, seed, t))
        .collect::<Result<_>>()?;

    // summed in trial order after collection
    let k = cfg.k as f64;
    let mut per_user = vec![0.0; cfg.k];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for errs in &per_trial {
        let total = errs.iter().sum::<f64>() / k;
        sum += total;
        sum_sq += total * total;
        for (acc, e) in per_user.iter_mut().zip(errs) {
            *acc += e;
        }
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(WsmseReport {
        normalized: mean,
        per_user: per_user.into_iter().map(|v| v / n).collect(),
        stderr: Some((var / n).sqrt()),
        trials: Some(trials),
    })
}
