//! Pilot matrices and their text serialization.
//!
//! The text format is a header line `N K` followed by `N·K` lines `re im`,
//! walking the matrix column by column. Values are written with 17
//! significant digits so they read back bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::numerics::{norm_sqr, CMatrix};

/// Slack allowed on the power constraint `‖x_k‖² ≤ P_k`.
pub const POWER_SLACK: f64 = 1e-9;

/// N×K pilot matrix; column k is user k's pilot sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix(CMatrix);

impl PilotMatrix {
    pub fn new(x: CMatrix) -> Self {
        PilotMatrix(x)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Pilot length N.
    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0 || self.0.cols() == 0
    }

    pub fn users(&self) -> usize {
        self.0.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.0.column(k)
    }

    pub fn set_column(&mut self, k: usize, v: &[Complex64]) -> Result<()> {
        self.0.set_column(k, v)
    }

    pub fn column_energy(&self, k: usize) -> f64 {
        norm_sqr(&self.column(k))
    }

    /// Checks shape against `cfg` and `‖x_k‖² ≤ P_k + 1e-9`.
    pub fn check_against(&self, cfg: &SystemConfig) -> Result<()> {
        if self.shape() != (cfg.n, cfg.k) {
            return Err(Error::contract(format!(
                "pilot matrix is {}x{}, configuration needs {}x{}",
                self.len(),
                self.users(),
                cfg.n,
                cfg.k
            )));
        }
        if !self.0.is_finite() {
            return Err(Error::contract("pilot matrix has non-finite entries"));
        }
        for k in 0..cfg.k {
            let e = self.column_energy(k);
            if e > cfg.powers[k] + POWER_SLACK {
                return Err(Error::contract(format!(
                    "pilot {k} has energy {e} above its budget {}",
                    cfg.powers[k]
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let (n, k) = self.shape();
        let mut s = format!("{n} {k}\n");
        for j in 0..k {
            for i in 0..n {
                let z = self.0[(i, j)];
                writeln!(s, "{:.16e} {:.16e}", z.re, z.im).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing \"N K\" header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(hl + 1, format!("bad header {header:?}")))?;
        let [n, k] = dims[..] else {
            return Err(err(hl + 1, format!("header must be \"N K\", got {header:?}")));
        };
        if n == 0 || k == 0 {
            return Err(err(hl + 1, "dimensions must be positive".into()));
        }
        let mut x = CMatrix::zeros(n, k);
        for idx in 0..n * k {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| err(0, format!("expected {} entries, found {idx}", n * k)))?;
            let parts: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(ln + 1, format!("bad entry {line:?}")))?;
            let [re, im] = parts[..] else {
                return Err(err(ln + 1, format!("entry must be \"re im\", got {line:?}")));
            };
            x[(idx % n, idx / n)] = Complex64::new(re, im);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln + 1, "trailing data after last entry".into()));
        }
        Ok(PilotMatrix(x))
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}
