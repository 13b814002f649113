use serde::{Deserialize, Serialize};

/// Normalized weighted-sum MSE, i.e. `Σ_k ‖ĥ_k − h_k‖²/g_k` divided by `K·M`.
///
/// `per_user[k]` is user k's share before the `1/K` average, so
/// `normalized == mean(per_user)`. Analytic reports leave `stderr` and
/// `trials` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsmseReport {
    pub normalized: f64,
    pub per_user: Vec<f64>,
    pub stderr: Option<f64>,
    pub trials: Option<usize>,
}

impl WsmseReport {
    pub fn analytic(per_user: Vec<f64>) -> Self {
        let normalized = per_user.iter().sum::<f64>() / per_user.len() as f64;
        WsmseReport {
            normalized,
            per_user,
            stderr: None,
            trials: None,
        }
    }
}
