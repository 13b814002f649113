//! Globally optimal pilots for the two cases with a closed form.

use num_complex::Complex64;

use crate::conventional::cyclic_dft_pilots;
use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::numerics::CMatrix;
use crate::pilot::PilotMatrix;

/// N = 1: every user sends `√P_k`; objective `1/(Σ g_k P_k + σ²)`.
pub fn closed_form_n1(cfg: &SystemConfig) -> Result<PilotMatrix> {
    if cfg.n != 1 {
        return Err(Error::contract(format!("closed_form_n1 needs N = 1, got N = {}", cfg.n)));
    }
    Ok(PilotMatrix::new(CMatrix::from_fn(1, cfg.k, |_, j| {
        Complex64::new(cfg.powers[j].sqrt(), 0.0)
    })))
}

/// N = K: orthogonal DFT columns at full power; objective `Σ 1/(g_k P_k + σ²)`.
pub fn closed_form_nk(cfg: &SystemConfig) -> Result<PilotMatrix> {
    if cfg.n != cfg.k {
        return Err(Error::contract(format!(
            "closed_form_nk needs N = K, got N = {}, K = {}",
            cfg.n, cfg.k
        )));
    }
    Ok(cyclic_dft_pilots(cfg.n, cfg.k, &cfg.powers))
}
