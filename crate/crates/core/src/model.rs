//! System configuration, channel and noise generation, and the uplink pilot
//! signal `Y = H Xᴴ + N`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{draw_cn, CMatrix, RandomStream};
use crate::pilot::PilotMatrix;

/// Dimensions, noise level, power budgets and path-loss gains.
///
/// `powers[k]` is user k's total pilot energy over all `n` symbols, i.e. the
/// bound on `‖x_k‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Base-station antennas.
    pub m: usize,
    /// Users.
    pub k: usize,
    /// Pilot length in symbol periods.
    pub n: usize,
    /// Noise variance (linear).
    pub sigma2: f64,
    pub powers: Vec<f64>,
    pub gains: Vec<f64>,
}

impl SystemConfig {
    pub fn new(m: usize, k: usize, n: usize, sigma2: f64, powers: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        let cfg = SystemConfig {
            m,
            k,
            n,
            sigma2,
            powers,
            gains,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every user gets the same power budget.
    pub fn uniform_power(m: usize, n: usize, sigma2: f64, power: f64, gains: Vec<f64>) -> Result<Self> {
        let k = gains.len();
        Self::new(m, k, n, sigma2, vec![power; k], gains)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 || self.n == 0 {
            return Err(Error::Config(format!(
                "dimensions must be positive (M={}, K={}, N={})",
                self.m, self.k, self.n
            )));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return Err(Error::Config(format!("noise variance {} must be finite and >= 0", self.sigma2)));
        }
        if self.powers.len() != self.k || self.gains.len() != self.k {
            return Err(Error::Config(format!(
                "expected {} powers and gains, got {} and {}",
                self.k,
                self.powers.len(),
                self.gains.len()
            )));
        }
        if let Some(p) = self.powers.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::Config(format!("power budget {p} must be positive")));
        }
        if let Some(g) = self.gains.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::Config(format!("path-loss gain {g} must be positive")));
        }
        Ok(())
    }

    pub fn with_sigma2(&self, sigma2: f64) -> Self {
        SystemConfig {
            sigma2,
            ..self.clone()
        }
    }

    pub fn with_pilot_length(&self, n: usize) -> Self {
        SystemConfig { n, ..self.clone() }
    }

    /// Common power budget, if all users share one (relative tolerance 1e-12).
    pub fn uniform_power_value(&self) -> Option<f64> {
        let p = self.powers[0];
        self.powers
            .iter()
            .all(|q| (q - p).abs() <= 1e-12 * p.abs())
            .then_some(p)
    }

    pub fn average_power(&self) -> f64 {
        self.powers.iter().sum::<f64>() / self.powers.len() as f64
    }
}

/// M×K channel realization; column k is user k's channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(pub CMatrix);

/// M×N received pilot block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal(pub CMatrix);

/// The 8×4 gain matrix of the reference scenario, row by row.
const PAPER_GAIN_ROWS: [[f64; 4]; 8] = [
    [0.0450, 0.7400, 0.8191, 0.2608],
    [0.7040, 0.2965, 0.0823, 0.8754],
    [0.0775, 0.7410, 0.1251, 0.4437],
    [0.5925, 0.6363, 0.5327, 0.2087],
    [0.6737, 0.2419, 0.7205, 0.4000],
    [0.3940, 0.4115, 0.1497, 0.8782],
    [0.0218, 0.9238, 0.6326, 0.0669],
    [0.6327, 0.7537, 0.7697, 0.0697],
];

/// The 32 reference path-loss gains, column-major vectorization of the 8×4
/// gain matrix.
pub fn paper_gains() -> Vec<f64> {
    (0..4)
        .flat_map(|c| PAPER_GAIN_ROWS.iter().map(move |row| row[c]))
        .collect()
}

/// `h_k = √g_k · CN(0, I_M)`, drawn from `stream`.
pub fn generate_channel(cfg: &SystemConfig, stream: &mut RandomStream) -> ChannelMatrix {
    let mut h = draw_cn(stream, cfg.m, cfg.k);
    let amp: Vec<f64> = cfg.gains.iter().map(|g| g.sqrt()).collect();
    for i in 0..cfg.m {
        for (j, a) in amp.iter().enumerate() {
            h[(i, j)] *= a;
        }
    }
    ChannelMatrix(h)
}

/// M×N noise with i.i.d. CN(0, σ²) entries.
pub fn generate_noise(cfg: &SystemConfig, stream: &mut RandomStream) -> CMatrix {
    draw_cn(stream, cfg.m, cfg.n).scale_real(cfg.sigma2.sqrt())
}

/// `Y = H Xᴴ + noise`.
pub fn received_pilot_signal(h: &ChannelMatrix, x: &PilotMatrix, noise: &CMatrix) -> Result<ReceivedSignal> {
    let (m, k) = h.0.shape();
    let (n, kx) = x.shape();
    if kx != k || noise.shape() != (m, n) {
        return Err(Error::contract(format!(
            "inconsistent shapes: H {m}x{k}, X {n}x{kx}, noise {}x{}",
            noise.rows(),
            noise.cols()
        )));
    }
    let y = h.0.matmul(&x.matrix().adjoint())?;
    Ok(ReceivedSignal(y.try_add(noise)?))
}

/// `σ² = P_av / 10^(snr_db/10)` with `P_av` the mean power budget.
pub fn sigma2_from_snr(snr_db: f64, powers: &[f64]) -> f64 {
    let p_av = powers.iter().sum::<f64>() / powers.len() as f64;
    p_av / 10f64.powf(snr_db / 10.0)
}

/// Parses a gains (or powers) file: one decimal value per line, `#` starts a
/// comment, blank lines ignored.
pub fn parse_value_list(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("expected a number, found {line:?}"),
        })?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("value {v} must be positive and finite"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_value_list(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_value_list(&text, path)
}

/// Serializes values one per line, in a form [`parse_value_list`] reads back.
pub fn format_value_list(values: &[f64], comment: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    for v in values {
        s.push_str(&format!("{v}\n"));
    }
    s
}
