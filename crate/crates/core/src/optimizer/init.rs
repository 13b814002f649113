use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conventional::cyclic_dft_pilots;
use crate::error::Error;
use crate::model::SystemConfig;
use crate::numerics::{draw_cn, norm_sqr, CMatrix, RandomStream};
use crate::pilot::PilotMatrix;

/// Starting pilots for the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitScheme {
    /// First K columns of `[U U ...]`, U the unitary N-point DFT (the
    /// baseline pilots).
    DftReuse,
    /// First N rows of the K-point DFT.
    DftKTruncated,
    /// Complex Gaussian columns.
    Random,
}

impl InitScheme {
    pub const ALL: [InitScheme; 3] = [InitScheme::DftReuse, InitScheme::DftKTruncated, InitScheme::Random];

    pub fn label(self) -> &'static str {
        match self {
            InitScheme::DftReuse => "dft-reuse",
            InitScheme::DftKTruncated => "dft-k",
            InitScheme::Random => "random",
        }
    }
}

impl fmt::Display for InitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "dft-reuse" => Ok(InitScheme::DftReuse),
            "dft-k" | "dft-k-truncated" => Ok(InitScheme::DftKTruncated),
            "random" => Ok(InitScheme::Random),
            other => Err(Error::Config(format!(
                "unknown initialization {other:?} (expected dft-reuse, dft-k or random)"
            ))),
        }
    }
}

/// Stream id reserved for the random initialization, clear of the
/// per-trial channel and noise ids.
const RANDOM_INIT_STREAM: u64 = u64::MAX;

/// Initial pilots, every column scaled to exactly `‖x_k‖² = P_k`.
pub fn initial_pilots(scheme: InitScheme, cfg: &SystemConfig, seed: u64) -> PilotMatrix {
    let (n, k) = (cfg.n, cfg.k);
    let raw = match scheme {
        InitScheme::DftReuse => return cyclic_dft_pilots(n, k, &cfg.powers),
        InitScheme::DftKTruncated => CMatrix::from_fn(n, k, |r, c| {
            Complex64::from_polar(1.0, -2.0 * PI * ((r * c) % k) as f64 / k as f64)
        }),
        InitScheme::Random => draw_cn(&mut RandomStream::new(seed, RANDOM_INIT_STREAM), n, k),
    };
    let mut x = raw;
    for c in 0..k {
        let col = x.column(c);
        let s = (cfg.powers[c] / norm_sqr(&col)).sqrt();
        for r in 0..n {
            x[(r, c)] *= s;
        }
    }
    PilotMatrix::new(x)
}
