//! Seeded random numbers.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded through
//! `SeedableRng::seed_from_u64`. Uniform reals take the top 53 bits of one
//! `u64` draw. Normal variates use the polar-free Box–Muller transform and
//! the second variate of each pair is cached, so one call sequence always
//! produces the same stream. Transcendentals come from `libm`, which keeps the
//! streams identical across platforms.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;
use crate::points::PointSet;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Single-owner random state. Derive children with [`RngState::fork`] for
/// independent sub-streams instead of sharing one state.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// The seed this state was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// A new state seeded from the next draw of this one.
    pub fn fork(&mut self) -> RngState {
        RngState::new(self.next_u64())
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `(0, 1]`.
    fn uniform_nonzero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `[low, high)`.
    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Uniform integer in `0..bound` without modulo bias. `bound` must be > 0.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Standard normal variate (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_nonzero();
        let u2 = self.uniform();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let angle = TAU * u2;
        self.spare_normal = Some(r * math::sin(angle));
        r * math::cos(angle)
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// A random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }
}

/// `n` i.i.d. draws from the `d`-dimensional standard normal, row by row.
pub fn sample_standard_normal(rng: &mut RngState, n: usize, d: usize) -> PointSet {
    assert!(d >= 1, "dimension must be at least 1");
    let data = (0..n * d).map(|_| rng.normal()).collect();
    PointSet::from_flat_unchecked(d, data)
}

/// Rows drawn from `N(mean, diag(std^2))`.
pub fn sample_diagonal_normal(rng: &mut RngState, n: usize, mean: &[f64], std: &[f64]) -> PointSet {
    assert_eq!(mean.len(), std.len());
    let d = mean.len();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for (m, s) in mean.iter().zip(std) {
            data.push(m + s * rng.normal());
        }
    }
    PointSet::from_flat_unchecked(d, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_std(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    #[test]
    fn standard_normal_moments_1d() {
        let mut rng = RngState::new(7);
        let s = sample_standard_normal(&mut rng, 10_000, 1);
        let (mean, std) = mean_std(s.as_slice());
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((std - 1.0).abs() < 0.05, "std {std}");
    }

    #[test]
    fn standard_normal_is_deterministic() {
        let a = sample_standard_normal(&mut RngState::new(7), 1, 3);
        let b = sample_standard_normal(&mut RngState::new(7), 1, 3);
        assert_eq!(a.n(), 1);
        assert!(a.as_slice().iter().all(|v| v.is_finite()));
        assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn squared_norm_mean_matches_dimension() {
        let s = sample_standard_normal(&mut RngState::new(7), 10_000, 2);
        let m = s.rows().map(|r| r.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / 10_000.0;
        assert!((m - 2.0).abs() < 0.1, "E|Z|^2 = {m}");
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = RngState::new(1);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn below_covers_range() {
        let mut rng = RngState::new(3);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[rng.below(5)] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn forks_are_reproducible() {
        let mut a = RngState::new(11);
        let mut b = RngState::new(11);
        assert_eq!(a.fork().next_u64(), b.fork().next_u64());
    }
}
