//! Seeded random numbers for trace synthesis.
//!
//! The stream is xoshiro256++ whose 256-bit state is filled from the 64-bit
//! seed with SplitMix64, exactly as `rand_xoshiro`'s `seed_from_u64` does.
//! Derived draws are defined bit-for-bit so other implementations can
//! reproduce generated traces:
//!
//! - `uniform()`: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`.
//! - `gaussian()`: one Box–Muller cosine branch from two uniforms `u1, u2`:
//!   `sqrt(-2 ln(1 - u1)) * cos(2π u2)`. The sine branch is discarded.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: Xoshiro256PlusPlus,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        lo + (self.uniform() * (hi - lo + 1) as f64) as u64
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
