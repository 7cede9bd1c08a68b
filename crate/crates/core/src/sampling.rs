//! Seeded sampling for randomized sweeps.
//!
//! The generator is SplitMix64 (64-bit state, one multiply-xorshift output
//! per step). Uniform doubles take the top 53 bits of each output, so a seed
//! reproduces the same stream on every platform. [`SweepSampler::split`]
//! derives an independent child stream, which lets parallel sweeps stay
//! deterministic: draw one child per trial up front, in order.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dynamics::RegionKind;
use crate::error::{QdynError, Result};
use crate::model::{State, ThetaParams};

/// Rates are drawn uniformly from `(THETA_LOW, THETA_HIGH]`.
pub const THETA_LOW: f64 = 0.05;
pub const THETA_HIGH: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct SweepSampler {
    rng: SplitMix64,
}

impl SweepSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed) }
    }

    pub fn split(&mut self) -> Self {
        Self::new(self.rng.gen())
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.gen()
    }

    /// Uniform in `(0, 1]`.
    pub fn unit_open_low(&mut self) -> f64 {
        1.0 - self.unit()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn dimension(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    /// Rates uniform in `(0.05, 3]ⁿ`.
    pub fn theta(&mut self, n: usize) -> Result<ThetaParams> {
        let theta = (0..n)
            .map(|_| THETA_HIGH - (THETA_HIGH - THETA_LOW) * self.unit())
            .collect();
        ThetaParams::new(theta)
    }

    /// A point strictly inside the decay region `M̄₁` or the escape region
    /// `M̄₂`: a random positive direction scaled below the smallest (resp.
    /// above the largest) scale at which it meets a bounding hyperplane.
    pub fn point_in_region(&mut self, params: &ThetaParams, region: RegionKind) -> Result<State> {
        let n = params.dim();
        let dir: Vec<f64> = (0..n).map(|_| self.unit_open_low()).collect();
        let total: f64 = dir.iter().sum();
        let scales = params
            .as_slice()
            .iter()
            .zip(&dir)
            .map(|(t, d)| (2.0 / t) / (2.0 * total - d));
        let s = match region {
            RegionKind::Mbar1 => scales.fold(f64::INFINITY, f64::min) * self.unit_open_low() * (1.0 - 1e-9),
            RegionKind::Mbar2 => scales.fold(0.0, f64::max) * (1.0 + 1e-9 + self.unit_open_low()),
            other => {
                return Err(QdynError::Precondition(format!(
                    "sampling supports Mbar1 and Mbar2 only (got {other})"
                )))
            }
        };
        State::new(dir.into_iter().map(|d| s * d).collect())
    }
}
