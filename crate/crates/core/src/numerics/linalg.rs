//! Solves and matrix functions for Hermitian positive definite matrices.

use num_complex::Complex64;

use super::eig::{check_hermitian, hermitian_eig};
use super::CMatrix;
use crate::error::{Error, Result};

/// Smallest admissible eigenvalue relative to the largest.
pub const SINGULARITY_RATIO: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `a = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    pub fn new(a: &CMatrix) -> Result<Self> {
        check_hermitian(a)?;
        let n = a.rows();
        let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > SINGULARITY_RATIO * max_diag) || !d.is_finite() {
                return Err(singular(a));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &CMatrix {
        &self.l
    }

    /// Solves `a x = b` for every column of `b`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::contract(format!(
                "right-hand side has {} rows, system has {n}",
                b.rows()
            )));
        }
        let mut x = b.clone();
        for c in 0..b.cols() {
            // L y = b
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
            // Lᴴ x = y
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let m = CMatrix::from_columns(b.len(), &[b.to_vec()])?;
        Ok(self.solve(&m)?.column(0))
    }

    /// Explicit inverse, Hermitian by construction.
    pub fn inverse(&self) -> Result<CMatrix> {
        Ok(self.solve(&CMatrix::identity(self.l.rows()))?.hermitian_part())
    }
}

fn singular(a: &CMatrix) -> Error {
    let eigenvalue = hermitian_eig(a).map(|e| e.min_value()).unwrap_or(f64::NAN);
    Error::Singular { eigenvalue }
}

/// `a⁻¹ b` for Hermitian positive definite `a`.
pub fn solve_hermitian(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Cholesky::new(a)?.solve(b)
}

/// `h^{-1/2}` for Hermitian positive definite `h`.
pub fn inv_sqrt_psd(h: &CMatrix) -> Result<CMatrix> {
    let e = hermitian_eig(h)?;
    let lmax = e.max_value();
    let lmin = e.min_value();
    if !(lmax > 0.0) || !(lmin > SINGULARITY_RATIO * lmax) {
        return Err(Error::Singular { eigenvalue: lmin });
    }
    Ok(e.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// `tr(a⁻¹)` through the Cholesky factor.
pub fn trace_inverse(a: &CMatrix) -> Result<f64> {
    let inv = Cholesky::new(a)?.inverse()?;
    Ok(inv.trace().re)
}

/// `tr(a⁻¹)` as the sum of reciprocal eigenvalues.
pub fn trace_inverse_eig(a: &CMatrix) -> Result<f64> {
    let e = hermitian_eig(a)?;
    let lmax = e.max_value();
    if !(lmax > 0.0) || !(e.min_value() > SINGULARITY_RATIO * lmax) {
        return Err(Error::Singular {
            eigenvalue: e.min_value(),
        });
    }
    Ok(e.values.iter().map(|l| 1.0 / l).sum())
}
