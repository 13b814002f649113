//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that annihilates
//! it. The matrices handled here are at most a few dozen rows, where Jacobi
//! is both simple and accurate to a few ulps in the eigenvalues.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Absolute Hermitian tolerance, scaled by `max(1, max|h|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Column `j` pairs with `values[j]`.
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// `V diag(f(λ)) Vᴴ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, &w) in fl.iter().enumerate() {
                    acc += v[(i, l)] * v[(j, l)].conj() * w;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("empty decomposition")
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }
}

pub(crate) fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::contract(format!(
            "expected a square Hermitian matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_finite() {
        return Err(Error::contract("matrix has non-finite entries"));
    }
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (max |h - h^H| = {defect:e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order. Each eigenvector has unit
/// norm and is rotated so that its largest-magnitude component (the first
/// such, on ties) is real and positive.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);

    let scale = a.frobenius_norm();
    let mut sweeps = 0;
    if scale > 0.0 {
        loop {
            let off = off_diagonal_norm(&a);
            if off <= f64::EPSILON * 1e-2 * scale {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::NoConvergence { iterations: sweeps });
            }
            sweeps += 1;
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    rotated |= rotate(&mut a, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = normalize_phase(v.column(src));
        vectors.set_column(dst, &col)?;
    }
    Ok(HermitianEig { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation in the (p, q) plane. Returns false when the pivot is
/// already negligible.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)];
    let r = apq.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r == 0.0 || r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        if r != 0.0 {
            a[(p, q)] = Complex64::new(0.0, 0.0);
            a[(q, p)] = Complex64::new(0.0, 0.0);
        }
        return false;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, .., e^{-iφ} at q, ..) · R(c, s); A ← Gᴴ A G, V ← V G.
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;
    let n = a.rows();

    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c + aiq * gqp;
        a[(i, q)] = aip * s + aiq * gqq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * gqp;
        v[(i, q)] = vip * s + viq * gqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * gqp.conj();
        a[(q, j)] = apj * s + aqj * gqq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    true
}

/// Rotates `v` so that its largest-magnitude entry is real positive, and
/// rescales it to unit norm.
pub fn normalize_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v;
    }
    let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // first entry within rounding of the maximum, so ties resolve by index
    let pivot = v
        .iter()
        .position(|z| z.norm() >= biggest * (1.0 - 1e-12))
        .unwrap_or(0);
    let rot = v[pivot].conj() / (v[pivot].norm() * norm);
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
    v
}
