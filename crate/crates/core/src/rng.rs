//! Portable seeded randomness.
//!
//! Every draw comes from a SplitMix64 stream whose state is
//! `seed + (index + 1) * 0x9E3779B97F4A7C15` (wrapping), so draw `index`
//! does not depend on any other draw. Uniforms use the top 53 bits of a
//! 64-bit output, `u = (x >> 11) * 2^-53`, and normals use the cosine branch
//! of Box-Muller, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) struct Stream(SplitMix64);

impl Stream {
    pub fn new(seed: u64, index: u64) -> Self {
        let state = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        Stream(SplitMix64::from_seed(state.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Log-uniform on `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.uniform() * (hi.ln() - lo.ln())).exp()
    }
}
