//! Baseline: DFT pilots reused cyclically when K > N, decorrelation by the
//! pilot matrix, and a per-user scalar MMSE shrinkage.
//!
//! With uniform pilot energy P the decoupled statistic for user k is
//! `z_k = Y x_k = P (h_k + Σ_{i∈clash(k)} h_i) + N x_k`, and the estimate is
//! `ĥ_k = c_k z_k`. The default scalar `c_k = g_k/(P g_k + σ²)` ignores the
//! clashing users; [`Receiver::ContaminationAware`] folds their power in.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, ReceivedSignal, SystemConfig};
use crate::numerics::CMatrix;
use crate::pilot::PilotMatrix;
use crate::report::WsmseReport;

/// Which users share a pilot column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReuseMap {
    clash: Vec<Vec<usize>>,
}

impl ReuseMap {
    /// Users `i ≠ j` clash iff `i mod n == j mod n`.
    pub fn cyclic(n: usize, k: usize) -> Self {
        let clash = (0..k)
            .map(|u| (0..k).filter(|&v| v != u && v % n == u % n).collect())
            .collect();
        ReuseMap { clash }
    }

    /// Other users assigned the same pilot as `k`.
    pub fn clash_set(&self, k: usize) -> &[usize] {
        &self.clash[k]
    }

    pub fn users(&self) -> usize {
        self.clash.len()
    }

    pub fn is_contaminated(&self) -> bool {
        self.clash.iter().any(|c| !c.is_empty())
    }
}

/// Shrinkage scalar used by the baseline receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Receiver {
    /// `c_k = g_k/(P g_k + σ²)`: derived as if there were no pilot reuse.
    #[default]
    Standard,
    /// `c_k = g_k/(P(g_k + Σ_clash g_i) + σ²)`. Not the reference baseline;
    /// for sensitivity studies only.
    ContaminationAware,
}

/// Unitary N-point DFT matrix, `U[m][n] = e^{-2πi·mn/N}/√N`.
pub fn dft_matrix(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |r, c| {
        let phase = -2.0 * PI * ((r * c) % n) as f64 / n as f64;
        Complex64::from_polar(s, phase)
    })
}

/// First K columns of `[U U U ...]`, column k scaled to `√powers[k]`.
///
/// Works for any power profile; [`design_reuse_pilots`] adds the uniform
/// power requirement of the baseline receiver.
pub fn cyclic_dft_pilots(n: usize, k: usize, powers: &[f64]) -> PilotMatrix {
    let u = dft_matrix(n);
    PilotMatrix::new(CMatrix::from_fn(n, k, |r, c| u[(r, c % n)] * powers[c].sqrt()))
}

/// Baseline pilots: cyclically reused DFT columns at a common power.
pub fn design_reuse_pilots(n: usize, k: usize, powers: &[f64]) -> Result<(PilotMatrix, ReuseMap)> {
    if n == 0 || k == 0 || powers.len() != k {
        return Err(Error::Config(format!(
            "need N, K >= 1 and K powers (N={n}, K={k}, {} powers)",
            powers.len()
        )));
    }
    let p = powers[0];
    if powers.iter().any(|q| (q - p).abs() > 1e-12 * p.abs()) {
        return Err(Error::Unsupported(
            "the reuse baseline requires equal power budgets for all users".into(),
        ));
    }
    Ok((cyclic_dft_pilots(n, k, powers), ReuseMap::cyclic(n, k)))
}

fn uniform_power(cfg: &SystemConfig) -> Result<f64> {
    cfg.uniform_power_value().ok_or_else(|| {
        Error::Unsupported("the reuse baseline requires equal power budgets for all users".into())
    })
}

/// Per-user shrinkage scalars.
pub fn receiver_scalars(cfg: &SystemConfig, reuse: &ReuseMap, receiver: Receiver) -> Result<Vec<f64>> {
    let p = uniform_power(cfg)?;
    Ok((0..cfg.k)
        .map(|k| {
            let g = cfg.gains[k];
            let interference = match receiver {
                Receiver::Standard => 0.0,
                Receiver::ContaminationAware => reuse.clash_set(k).iter().map(|&i| cfg.gains[i]).sum(),
            };
            g / (p * (g + interference) + cfg.sigma2)
        })
        .collect())
}

/// N×K combining matrix `W` with `Ĥ = Y W`; column k is `c_k x_k`.
pub fn combining_matrix(x: &PilotMatrix, cfg: &SystemConfig, reuse: &ReuseMap, receiver: Receiver) -> Result<CMatrix> {
    x.check_against(cfg)?;
    let c = receiver_scalars(cfg, reuse, receiver)?;
    Ok(CMatrix::from_fn(cfg.n, cfg.k, |i, j| x.matrix()[(i, j)] * c[j]))
}

/// Baseline estimate `ĥ_k = c_k · Y x_k` with the standard scalar.
pub fn conventional_estimate(y: &ReceivedSignal, x: &PilotMatrix, cfg: &SystemConfig) -> Result<ChannelMatrix> {
    let reuse = ReuseMap::cyclic(cfg.n, cfg.k);
    conventional_estimate_with(y, x, cfg, &reuse, Receiver::Standard)
}

pub fn conventional_estimate_with(
    y: &ReceivedSignal,
    x: &PilotMatrix,
    cfg: &SystemConfig,
    reuse: &ReuseMap,
    receiver: Receiver,
) -> Result<ChannelMatrix> {
    if y.0.shape() != (cfg.m, cfg.n) {
        return Err(Error::contract(format!(
            "received block is {}x{}, expected {}x{}",
            y.0.rows(),
            y.0.cols(),
            cfg.m,
            cfg.n
        )));
    }
    let w = combining_matrix(x, cfg, reuse, receiver)?;
    Ok(ChannelMatrix(y.0.matmul(&w)?))
}

/// Decoupled statistic `Z = Y X`.
pub fn decouple(y: &ReceivedSignal, x: &PilotMatrix) -> Result<CMatrix> {
    y.0.matmul(x.matrix())
}

/// Analytic normalized WSMSE of the baseline, including contamination.
///
/// Per coefficient, user k's error is
/// `|c_k P − 1|² g_k + c_k² (P² Σ_{clash} g_i + σ² P)`; dividing by `g_k`
/// and averaging over users gives the normalized figure.
pub fn conventional_analytic_wsmse(cfg: &SystemConfig, reuse: &ReuseMap) -> Result<WsmseReport> {
    conventional_analytic_wsmse_with(cfg, reuse, Receiver::Standard)
}

pub fn conventional_analytic_wsmse_with(cfg: &SystemConfig, reuse: &ReuseMap, receiver: Receiver) -> Result<WsmseReport> {
    if reuse.users() != cfg.k {
        return Err(Error::contract(format!(
            "reuse map covers {} users, configuration has {}",
            reuse.users(),
            cfg.k
        )));
    }
    let p = uniform_power(cfg)?;
    let c = receiver_scalars(cfg, reuse, receiver)?;
    let per_user = (0..cfg.k)
        .map(|k| {
            let g = cfg.gains[k];
            let clash: f64 = reuse.clash_set(k).iter().map(|&i| cfg.gains[i]).sum();
            let mse = (c[k] * p - 1.0).powi(2) * g + c[k] * c[k] * (p * p * clash + cfg.sigma2 * p);
            mse / g
        })
        .collect();
    Ok(WsmseReport::analytic(per_user))
}
