//! WSMSE-optimal pilot design.
//!
//! With the MMSE receiver and optimal combiner plugged in, the normalized
//! WSMSE reduces to `1 − N/K + (σ²/K)·tr(A⁻¹)` where
//! `A = Σ_i g_i x_i x_iᴴ + σ² I`. Pilots are therefore designed by minimizing
//! `tr(A⁻¹)` under `‖x_k‖² ≤ P_k`, one user at a time: holding the others
//! fixed, the best `x_k` maximizes the generalized Rayleigh quotient
//!
//! ```text
//!     g_k xᴴ Q_k⁻² x / xᴴ (g_k Q_k⁻¹ + I/P_k) x,     Q_k = A − g_k x_k x_kᴴ
//! ```
//!
//! which is solved by whitening with `F_k^{-1/2}`, `F_k = g_k Q_k⁻¹ + I/P_k`,
//! and taking the principal eigenvector. Sweeping k = 1..K repeatedly never
//! increases the objective.

mod closed_form;
mod estimator;
mod init;

pub use closed_form::{closed_form_n1, closed_form_nk};
pub use estimator::{
    analytic_wsmse, combiner_u, proposed_combining_matrix, proposed_estimate,
    receiver_scalar, wsmse_from_objective,
};
pub use init::{initial_pilots, InitScheme};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::numerics::{hermitian_eig, inv_sqrt_psd, norm_sqr, outer, trace_inverse, CMatrix, Cholesky};
use crate::pilot::PilotMatrix;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Top eigenvalues closer than this (relative) are treated as one eigenspace.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Objective after every single-user update of [`optimize_pilots`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub users: usize,
    pub initial_objective: f64,
    pub objective_per_update: Vec<f64>,
    pub sweeps_completed: usize,
    pub converged: bool,
    /// Updates whose top eigenvalue was degenerate.
    pub degenerate_updates: usize,
}

impl OptimizerTrace {
    pub fn final_objective(&self) -> f64 {
        self.objective_per_update
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }

    pub fn updates(&self) -> usize {
        self.objective_per_update.len()
    }

    /// Objective at the end of sweep `s` (sweep 0 is the initial point).
    pub fn objective_after_sweep(&self, s: usize) -> Option<f64> {
        if s == 0 {
            return Some(self.initial_objective);
        }
        self.objective_per_update.get(s * self.users - 1).copied()
    }

    /// Relative decrease of the objective over sweep `s` (1-based).
    pub fn sweep_relative_change(&self, s: usize) -> Option<f64> {
        let before = self.objective_after_sweep(s - 1)?;
        let after = self.objective_after_sweep(s)?;
        Some((before - after).abs() / before)
    }

    /// First update count after which the objective stays within `rel` of the
    /// final value.
    pub fn updates_to_within(&self, rel: f64) -> usize {
        let fin = self.final_objective();
        let values: Vec<f64> = std::iter::once(self.initial_objective)
            .chain(self.objective_per_update.iter().copied())
            .collect();
        let tail = values
            .iter()
            .rev()
            .take_while(|&&v| (v - fin).abs() <= rel * fin.abs())
            .count();
        values.len() - tail
    }

    /// `updates_to_within(rel) / K`, the fractional sweep count.
    pub fn sweeps_to_within(&self, rel: f64) -> f64 {
        self.updates_to_within(rel) as f64 / self.users as f64
    }

    /// Largest single-update increase of the objective (0 when monotone).
    pub fn max_increase(&self) -> f64 {
        let mut prev = self.initial_objective;
        let mut worst = 0.0f64;
        for &v in &self.objective_per_update {
            worst = worst.max(v - prev);
            prev = v;
        }
        worst
    }
}

fn check_shape(x: &PilotMatrix, cfg: &SystemConfig) -> Result<()> {
    if x.shape() != (cfg.n, cfg.k) {
        return Err(Error::contract(format!(
            "pilot matrix is {}x{}, configuration needs {}x{}",
            x.len(),
            x.users(),
            cfg.n,
            cfg.k
        )));
    }
    Ok(())
}

fn weighted_sum(x: &PilotMatrix, cfg: &SystemConfig, skip: Option<usize>) -> CMatrix {
    let n = cfg.n;
    let mut a = CMatrix::identity(n).scale_real(cfg.sigma2);
    for i in (0..cfg.k).filter(|&i| Some(i) != skip) {
        let xi = x.column(i);
        let g = cfg.gains[i];
        for r in 0..n {
            for c in 0..n {
                a[(r, c)] += xi[r] * xi[c].conj() * g;
            }
        }
    }
    a.hermitian_part()
}

/// `A = Σ_i g_i x_i x_iᴴ + σ² I`.
///
/// At `σ² = 0` the matrix must still be numerically invertible.
pub fn gram_matrix(x: &PilotMatrix, cfg: &SystemConfig) -> Result<CMatrix> {
    check_shape(x, cfg)?;
    let a = weighted_sum(x, cfg, None);
    if cfg.sigma2 == 0.0 {
        let e = hermitian_eig(&a)?;
        let lmax = e.max_value();
        if !(lmax > 0.0) || !(e.min_value() > crate::numerics::SINGULARITY_RATIO * lmax) {
            return Err(Error::Singular {
                eigenvalue: e.min_value(),
            });
        }
    }
    Ok(a)
}

/// Leave-one-out matrix `Q_k = Σ_{i≠k} g_i x_i x_iᴴ + σ² I`.
pub fn leave_one_out(x: &PilotMatrix, k: usize, cfg: &SystemConfig) -> Result<CMatrix> {
    check_shape(x, cfg)?;
    if k >= cfg.k {
        return Err(Error::contract(format!("user {k} out of range (K={})", cfg.k)));
    }
    Ok(weighted_sum(x, cfg, Some(k)))
}

/// Design objective `tr(A⁻¹)`.
pub fn objective(x: &PilotMatrix, cfg: &SystemConfig) -> Result<f64> {
    trace_inverse(&gram_matrix(x, cfg)?)
}

/// Result of one single-user update.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighUpdate {
    /// New pilot for the user, `‖·‖² = P_k`.
    pub column: Vec<Complex64>,
    /// The principal eigenvalue was not simple; the incumbent direction was
    /// kept (projected onto the principal eigenspace).
    pub degenerate: bool,
}

/// Optimal pilot for user `k` with all other pilots held fixed.
pub fn rayleigh_update(x: &PilotMatrix, k: usize, cfg: &SystemConfig) -> Result<RayleighUpdate> {
    let q = leave_one_out(x, k, cfg)?;
    let g = cfg.gains[k];
    let p = cfg.powers[k];
    let n = cfg.n;

    let q_inv = Cholesky::new(&q)?.inverse()?;
    let f = (&q_inv.scale_real(g) + &CMatrix::identity(n).scale_real(1.0 / p)).hermitian_part();
    let f_isqrt = inv_sqrt_psd(&f)?;
    let b = (&(&(&f_isqrt * &q_inv) * &q_inv) * &f_isqrt)
        .scale_real(g)
        .hermitian_part();
    let eig = hermitian_eig(&b)?;

    let top = eig.max_value();
    let space: Vec<usize> = (0..n)
        .filter(|&j| top - eig.values[j] <= DEGENERACY_GAP * top.abs())
        .collect();
    let degenerate = space.len() > 1;

    let principal = eig.vector(n - 1);
    let whitened = if degenerate {
        // keep the incumbent: F^{1/2} x_k, projected onto the principal eigenspace
        let f_sqrt = hermitian_eig(&f)?.reconstruct_with(f64::sqrt);
        let w = f_sqrt.mul_vec(&x.column(k))?;
        let mut proj = vec![Complex64::new(0.0, 0.0); n];
        for &j in &space {
            let v = eig.vector(j);
            let coef: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (pr, vi) in proj.iter_mut().zip(&v) {
                *pr += vi * coef;
            }
        }
        if norm_sqr(&proj) > 1e-16 * norm_sqr(&w) && norm_sqr(&w) > 0.0 {
            proj
        } else {
            principal
        }
    } else {
        principal
    };

    let mut column = f_isqrt.mul_vec(&whitened)?;
    let energy = norm_sqr(&column);
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Singular { eigenvalue: energy });
    }
    let gamma = (p / energy).sqrt();
    for z in column.iter_mut() {
        *z *= gamma;
    }
    Ok(RayleighUpdate { column, degenerate })
}

/// Sequential per-user updates, k = 1..K per sweep, until the relative
/// objective decrease over a sweep drops below `tol` or `max_sweeps` sweeps
/// have run.
pub fn optimize_pilots(
    cfg: &SystemConfig,
    init: &PilotMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<(PilotMatrix, OptimizerTrace)> {
    cfg.validate()?;
    if !(cfg.sigma2 > 0.0) {
        return Err(Error::contract("pilot optimization requires a positive noise variance"));
    }
    init.check_against(cfg)?;

    let mut x = init.clone();
    let mut trace = OptimizerTrace {
        users: cfg.k,
        initial_objective: objective(&x, cfg)?,
        objective_per_update: Vec::with_capacity(cfg.k * max_sweeps.min(8)),
        sweeps_completed: 0,
        converged: false,
        degenerate_updates: 0,
    };

    let mut current = trace.initial_objective;
    for _ in 0..max_sweeps {
        let before = current;
        for k in 0..cfg.k {
            let update = rayleigh_update(&x, k, cfg)?;
            trace.degenerate_updates += update.degenerate as usize;
            x.set_column(k, &update.column)?;
            current = match objective(&x, cfg) {
                Ok(v) if v.is_finite() => v,
                _ => {
                    trace.objective_per_update.push(f64::NAN);
                    return Err(Error::NonFiniteObjective {
                        update: trace.objective_per_update.len(),
                        trace: Box::new(trace),
                    });
                }
            };
            trace.objective_per_update.push(current);
        }
        trace.sweeps_completed += 1;
        if (before - current) / before < tol {
            trace.converged = true;
            break;
        }
    }
    Ok((x, trace))
}

/// `√P_k` times the eigenvector of `Q_k` with the smallest eigenvalue.
///
/// `B = g Q⁻²` and `F = g Q⁻¹ + I/P` share `Q`'s eigenbasis, and the quotient
/// along an eigenvector with eigenvalue `q` is `g/(q²/P + g q)`, decreasing in
/// `q`. Kept as an independent check of [`rayleigh_update`].
pub fn min_eigenvector_update(x: &PilotMatrix, k: usize, cfg: &SystemConfig) -> Result<Vec<Complex64>> {
    let q = leave_one_out(x, k, cfg)?;
    let e = hermitian_eig(&q)?;
    let s = cfg.powers[k].sqrt();
    Ok(e.vector(0).into_iter().map(|z| z * s).collect())
}

/// `g_k x_k x_kᴴ`, user k's contribution to `A`.
pub fn user_contribution(x: &PilotMatrix, k: usize, cfg: &SystemConfig) -> CMatrix {
    let xk = x.column(k);
    outer(&xk, &xk).scale_real(cfg.gains[k])
}

#[cfg(test)]
mod tests;
