//! Reproducible complex Gaussian draws.
//!
//! A stream is a ChaCha20 generator keyed by `seed` with its 64-bit stream
//! selector set to `stream_id`, so distinct ids give independent sequences
//! and any (seed, stream_id) pair replays identically on any thread.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::CMatrix;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One CN(0, 1) sample: `(a + ib)/√2` with `a, b` standard normal.
    pub fn next_cn(&mut self) -> Complex64 {
        let a: f64 = self.rng.sample(StandardNormal);
        let b: f64 = self.rng.sample(StandardNormal);
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }
}

/// `rows × cols` matrix of i.i.d. CN(0, 1) entries, filled row by row.
pub fn draw_cn(stream: &mut RandomStream, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| stream.next_cn())
}
