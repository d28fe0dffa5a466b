use alloc::vec::Vec;

use crate::points::PointSet;
use crate::rng::{sample_standard_normal, RngState};

/// Distribution the generator's inputs are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// `N(0, I)`.
    StandardNormal,
    /// Mixture of diagonal Gaussians, one per data cluster.
    Mixture { weights: Vec<f64>, means: PointSet, stds: PointSet },
}

impl Source {
    /// `n` rows of dimension `d`. For a mixture, each row first picks a
    /// component by weight and then draws its `d` coordinates.
    pub fn sample(&self, rng: &mut RngState, n: usize, d: usize) -> PointSet {
        match self {
            Source::StandardNormal => sample_standard_normal(rng, n, d),
            Source::Mixture { weights, means, stds } => {
                let mut data = Vec::with_capacity(n * d);
                for _ in 0..n {
                    let u = rng.uniform();
                    let mut acc = 0.0;
                    let mut k = weights.len() - 1;
                    for (i, w) in weights.iter().enumerate() {
                        acc += w;
                        if u < acc {
                            k = i;
                            break;
                        }
                    }
                    for (m, s) in means.row(k).iter().zip(stds.row(k)) {
                        data.push(m + s * rng.normal());
                    }
                }
                PointSet::from_flat_unchecked(d, data)
            }
        }
    }

    /// Index of the most likely mixture component for `y` (0 for the standard normal).
    pub fn component_of(&self, y: &[f64]) -> usize {
        match self {
            Source::StandardNormal => 0,
            Source::Mixture { weights, means, stds } => {
                let mut best = (0, f64::NEG_INFINITY);
                for (k, w) in weights.iter().enumerate() {
                    let mut logp = crate::math::ln(*w);
                    for ((v, m), s) in y.iter().zip(means.row(k)).zip(stds.row(k)) {
                        let s = s.max(1e-300);
                        let z = (v - m) / s;
                        logp -= 0.5 * z * z + crate::math::ln(s);
                    }
                    if logp > best.1 {
                        best = (k, logp);
                    }
                }
                best.0
            }
        }
    }
}
