//! Pilot design and channel estimation for TDD multiuser massive MIMO.
//!
//! Users send length-N pilots `x_k` and the base station observes
//! `Y = H Xᴴ + N` on M antennas. Two estimators are provided:
//!
//! * [`conventional`]: DFT pilots, reused cyclically when K > N, with a
//!   per-user scalar MMSE shrinkage (suffers pilot contamination).
//! * [`optimizer`]: pilots designed to minimize the weighted sum MSE by
//!   sequential generalized Rayleigh-quotient updates, followed by the
//!   matching MMSE combiner.
//!
//! [`harness`] runs the Monte Carlo comparisons.

pub mod conventional;
pub mod error;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod optimizer;
pub mod pilot;
pub mod report;

pub use error::{Error, Result};
pub use model::{ChannelMatrix, ReceivedSignal, SystemConfig};
pub use numerics::CMatrix;
pub use pilot::PilotMatrix;
pub use report::WsmseReport;
