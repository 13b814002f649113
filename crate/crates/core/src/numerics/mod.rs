//! Small dense complex linear algebra and seeded Gaussian streams.

mod cmatrix;
mod eig;
mod linalg;
mod random;

pub use cmatrix::{dot, norm_sqr, outer, CMatrix};
pub use eig::{hermitian_eig, normalize_phase, HermitianEig, HERMITIAN_TOL};
pub use linalg::{
    inv_sqrt_psd, solve_hermitian, trace_inverse, trace_inverse_eig, Cholesky, SINGULARITY_RATIO,
};
pub use random::{draw_cn, RandomStream};
