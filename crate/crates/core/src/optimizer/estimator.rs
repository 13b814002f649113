//! Channel estimation with designed pilots: `ĥ_k = W_kᴴ Y u_k`.
//!
//! For fixed pilots the best combiner is `u_k = g_k A⁻¹ x_k` and the MMSE
//! receiver is `W_k = c_k I` with `c_k = g_k (x_kᴴ u_k)/(u_kᴴ A u_k)`. At the
//! optimal combiner `c_k = 1`, so the estimate is simply `g_k Y A⁻¹ x_k`.

use num_complex::Complex64;

use super::gram_matrix;
use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, ReceivedSignal, SystemConfig};
use crate::numerics::{dot, CMatrix, Cholesky};
use crate::pilot::PilotMatrix;
use crate::report::WsmseReport;

/// Optimal combiner `u_k = g_k A⁻¹ x_k`.
pub fn combiner_u(x: &PilotMatrix, k: usize, cfg: &SystemConfig) -> Result<Vec<Complex64>> {
    let a = gram_matrix(x, cfg)?;
    let mut u = Cholesky::new(&a)?.solve_vec(&x.column(k))?;
    for z in u.iter_mut() {
        *z *= cfg.gains[k];
    }
    Ok(u)
}

/// MMSE receiver scalar `c_k` (with `W_k = c_k I`) for an arbitrary combiner.
pub fn receiver_scalar(x: &PilotMatrix, u: &[Complex64], k: usize, cfg: &SystemConfig) -> Result<Complex64> {
    let a = gram_matrix(x, cfg)?;
    let au = a.mul_vec(u)?;
    let denom = dot(u, &au).re;
    if !(denom > 0.0) {
        return Err(Error::contract("receiver scalar undefined for a zero combiner"));
    }
    Ok(dot(&x.column(k), u) * cfg.gains[k] / denom)
}

/// N×K matrix `C` with `Ĥ = Y C`; column k is `c̄_k u_k`.
pub fn proposed_combining_matrix(x: &PilotMatrix, cfg: &SystemConfig) -> Result<CMatrix> {
    let a = gram_matrix(x, cfg)?;
    let chol = Cholesky::new(&a)?;
    let mut out = CMatrix::zeros(cfg.n, cfg.k);
    for k in 0..cfg.k {
        let xk = x.column(k);
        let u: Vec<Complex64> = chol.solve_vec(&xk)?.into_iter().map(|z| z * cfg.gains[k]).collect();
        let denom = dot(&u, &a.mul_vec(&u)?).re;
        let c = if denom > 0.0 {
            dot(&xk, &u) * cfg.gains[k] / denom
        } else {
            // zero pilot: nothing to estimate from
            Complex64::new(0.0, 0.0)
        };
        let col: Vec<Complex64> = u.iter().map(|z| z * c.conj()).collect();
        out.set_column(k, &col)?;
    }
    Ok(out)
}

/// `ĥ_k = c̄_k · Y u_k` for every user.
pub fn proposed_estimate(y: &ReceivedSignal, x: &PilotMatrix, cfg: &SystemConfig) -> Result<ChannelMatrix> {
    if y.0.shape() != (cfg.m, cfg.n) {
        return Err(Error::contract(format!(
            "received block is {}x{}, expected {}x{}",
            y.0.rows(),
            y.0.cols(),
            cfg.m,
            cfg.n
        )));
    }
    let c = proposed_combining_matrix(x, cfg)?;
    Ok(ChannelMatrix(y.0.matmul(&c)?))
}

/// Analytic normalized WSMSE with the optimal combiner and receiver.
///
/// User k contributes `t_k = 1 − g_k x_kᴴ A⁻¹ x_k`.
pub fn analytic_wsmse(x: &PilotMatrix, cfg: &SystemConfig) -> Result<WsmseReport> {
    let a = gram_matrix(x, cfg)?;
    let chol = Cholesky::new(&a)?;
    let per_user = (0..cfg.k)
        .map(|k| {
            let xk = x.column(k);
            let s = chol.solve_vec(&xk)?;
            Ok(1.0 - cfg.gains[k] * dot(&xk, &s).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WsmseReport::analytic(per_user))
}

/// `1 − N/K + (σ²/K)·tr(A⁻¹)`, the normalized WSMSE from the design objective.
pub fn wsmse_from_objective(objective: f64, cfg: &SystemConfig) -> f64 {
    1.0 - cfg.n as f64 / cfg.k as f64 + cfg.sigma2 / cfg.k as f64 * objective
}
