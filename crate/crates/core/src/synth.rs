//! Synthetic data and transport oracles.
//!
//! The oracles are independent of the learned generator: a closed-form map
//! from the standard normal to `U(0, 1)`, an empirical quantile-matching map
//! between two 1D samples, and the radial extension of that map to rotation
//! invariant distributions.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::math;
use crate::points::{norm, PointSet, ZERO_NORM};
use crate::rng::RngState;

/// Parameter range of the swiss roll `f(θ) = θ (cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwissRollSpec {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for SwissRollSpec {
    fn default() -> Self {
        Self { theta_min: 1.5 * PI, theta_max: 4.5 * PI }
    }
}

impl SwissRollSpec {
    pub fn new(theta_min: f64, theta_max: f64) -> Result<Self> {
        if !(theta_min < theta_max) || !theta_min.is_finite() || !theta_max.is_finite() {
            return Err(invalid("swiss roll range", "theta_min must be below theta_max"));
        }
        Ok(Self { theta_min, theta_max })
    }

    /// `f(θ) = θ (cos θ, sin θ)`.
    pub fn embed_point(theta: f64) -> [f64; 2] {
        [theta * math::cos(theta), theta * math::sin(theta)]
    }
}

/// Axis-aligned box `[lows, highs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformBoxSpec {
    lows: Vec<f64>,
    highs: Vec<f64>,
}

impl UniformBoxSpec {
    pub fn new(lows: Vec<f64>, highs: Vec<f64>) -> Result<Self> {
        if lows.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lows.len() != highs.len() {
            return Err(invalid("box", "lows and highs differ in length"));
        }
        if lows.iter().zip(&highs).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(invalid("box", "every low must be below its high"));
        }
        Ok(Self { lows, highs })
    }

    /// `[0, 1)^d`.
    pub fn unit(d: usize) -> Self {
        Self { lows: alloc::vec![0.0; d], highs: alloc::vec![1.0; d] }
    }

    pub fn d(&self) -> usize {
        self.lows.len()
    }

    pub fn lows(&self) -> &[f64] {
        &self.lows
    }

    pub fn highs(&self) -> &[f64] {
        &self.highs
    }

    /// Membership in the box grown by `margin` on every side.
    pub fn contains(&self, p: &[f64], margin: f64) -> bool {
        p.iter()
            .zip(self.lows.iter().zip(&self.highs))
            .all(|(v, (l, h))| *v >= l - margin && *v <= h + margin)
    }

    fn disjoint_from(&self, other: &UniformBoxSpec) -> bool {
        (0..self.d()).any(|i| self.highs[i] <= other.lows[i] || other.highs[i] <= self.lows[i])
    }
}

/// Mixture of pairwise disjoint boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointUniformSpec {
    boxes: Vec<UniformBoxSpec>,
    weights: Vec<f64>,
}

impl DisjointUniformSpec {
    pub fn new(boxes: Vec<UniformBoxSpec>, weights: Vec<f64>) -> Result<Self> {
        if boxes.is_empty() || boxes.len() != weights.len() {
            return Err(invalid("mixture", "need one weight per box and at least one box"));
        }
        let d = boxes[0].d();
        if boxes.iter().any(|b| b.d() != d) {
            return Err(invalid("mixture", "boxes differ in dimension"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(invalid("mixture", "weights must be nonnegative and sum to 1"));
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if !boxes[i].disjoint_from(&boxes[j]) {
                    return Err(invalid("mixture", alloc::format!("boxes {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { boxes, weights })
    }

    /// Two unit squares side by side with a horizontal gap.
    pub fn two_unit_squares(gap: f64) -> Result<Self> {
        Self::new(
            alloc::vec![
                UniformBoxSpec::unit(2),
                UniformBoxSpec::new(alloc::vec![1.0 + gap, 0.0], alloc::vec![2.0 + gap, 1.0])?,
            ],
            alloc::vec![0.5, 0.5],
        )
    }

    pub fn boxes(&self) -> &[UniformBoxSpec] {
        &self.boxes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the first box containing `p` (grown by `margin`).
    pub fn locate(&self, p: &[f64], margin: f64) -> Option<usize> {
        self.boxes.iter().position(|b| b.contains(p, margin))
    }
}

/// `n` draws of θ, uniform on `[theta_min, theta_max)`.
pub fn sample_swiss_roll_theta(rng: &mut RngState, n: usize, spec: &SwissRollSpec) -> PointSet {
    let data = (0..n).map(|_| rng.uniform_range(spec.theta_min, spec.theta_max)).collect();
    PointSet::from_flat_unchecked(1, data)
}

/// Maps each θ to `θ (cos θ, sin θ)`.
pub fn swiss_roll_embed(theta: &PointSet) -> Result<PointSet> {
    if theta.d() != 1 {
        return Err(invalid("swiss roll input", "expected one column of θ values"));
    }
    let data = theta.as_slice().iter().flat_map(|&t| SwissRollSpec::embed_point(t)).collect();
    Ok(PointSet::from_flat_unchecked(2, data))
}

pub fn sample_uniform_box(rng: &mut RngState, n: usize, spec: &UniformBoxSpec) -> PointSet {
    let mut data = Vec::with_capacity(n * spec.d());
    for _ in 0..n {
        for (l, h) in spec.lows.iter().zip(&spec.highs) {
            data.push(rng.uniform_range(*l, *h));
        }
    }
    PointSet::from_flat_unchecked(spec.d(), data)
}

/// Each row comes from a box picked by mixture weight; returns the box index per row.
pub fn sample_disjoint_uniform(
    rng: &mut RngState,
    n: usize,
    spec: &DisjointUniformSpec,
) -> (PointSet, Vec<usize>) {
    let d = spec.boxes[0].d();
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut pick = None;
        for (i, w) in spec.weights.iter().enumerate() {
            acc += w;
            if u < acc && *w > 0.0 {
                pick = Some(i);
                break;
            }
        }
        // Round-off can leave u >= acc; fall back to the last box with weight.
        let k = pick.unwrap_or_else(|| spec.weights.iter().rposition(|w| *w > 0.0).unwrap_or(0));
        let b = &spec.boxes[k];
        for (l, h) in b.lows.iter().zip(&b.highs) {
            data.push(rng.uniform_range(*l, *h));
        }
        labels.push(k);
    }
    (PointSet::from_flat_unchecked(d, data), labels)
}

/// Φ(y), the standard normal CDF, as `erfc(-y/√2)/2` with libm's `erfc`
/// (relative error near one ulp, far below the 1e-7 needed here).
pub fn analytic_h_normal_to_uniform(y: f64) -> f64 {
    0.5 * math::erfc(-y / SQRT_2)
}

/// Quantile matching between two 1D samples.
///
/// The empirical CDF interpolates linearly between order statistics: the
/// k-th smallest of `m` values sits at level `k / (m - 1)`. A query is mapped
/// to its level under the source sample and then to the target value at the
/// same level. Queries outside the source range clamp to the target extremes.
#[derive(Debug, Clone)]
pub struct EmpiricalTransport1d {
    sorted_x: Vec<f64>,
    sorted_y: Vec<f64>,
}

impl EmpiricalTransport1d {
    pub fn new(samples_x: &[f64], samples_y: &[f64]) -> Result<Self> {
        for (what, s) in [("target sample", samples_x), ("source sample", samples_y)] {
            if s.len() < 2 {
                return Err(Error::TooFewSamples { what, needed: 2, found: s.len() });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(invalid(what, "contains non-finite values"));
            }
        }
        let mut sorted_x = samples_x.to_vec();
        let mut sorted_y = samples_y.to_vec();
        sorted_x.sort_by(f64::total_cmp);
        sorted_y.sort_by(f64::total_cmp);
        Ok(Self { sorted_x, sorted_y })
    }

    /// Level of `y` under the source sample, in `[0, 1]`.
    pub fn source_level(&self, y: f64) -> f64 {
        let s = &self.sorted_y;
        let last = s.len() - 1;
        if y <= s[0] {
            return 0.0;
        }
        if y >= s[last] {
            return 1.0;
        }
        // s[k] <= y < s[k + 1]
        let k = s.partition_point(|v| *v <= y) - 1;
        let frac = (y - s[k]) / (s[k + 1] - s[k]);
        (k as f64 + frac) / last as f64
    }

    /// Target value at level `p` in `[0, 1]`.
    pub fn target_quantile(&self, p: f64) -> f64 {
        let s = &self.sorted_x;
        let last = s.len() - 1;
        let pos = p.clamp(0.0, 1.0) * last as f64;
        let k = (math::floor(pos) as usize).min(last);
        if k == last {
            return s[last];
        }
        let frac = pos - k as f64;
        s[k] + frac * (s[k + 1] - s[k])
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.target_quantile(self.source_level(y))
    }
}

/// `F_X^{-1}(F_Y(y))` with both CDFs replaced by their interpolated empirical versions.
pub fn empirical_h_1d_oracle(samples_x: &PointSet, samples_y: &PointSet, y: f64) -> Result<f64> {
    if samples_x.d() != 1 || samples_y.d() != 1 {
        return Err(invalid("oracle samples", "expected one column"));
    }
    Ok(EmpiricalTransport1d::new(samples_x.as_slice(), samples_y.as_slice())?.eval(y))
}

/// Radial transport for rotation-invariant distributions: `h1(|y|) y/|y|`,
/// with `h1` the empirical map between norm samples. The origin maps to the origin.
#[derive(Debug, Clone)]
pub struct RadialTransport {
    radial: EmpiricalTransport1d,
}

impl RadialTransport {
    pub fn new(norms_x: &[f64], norms_y: &[f64]) -> Result<Self> {
        Ok(Self { radial: EmpiricalTransport1d::new(norms_x, norms_y)? })
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let r = norm(y);
        if r <= ZERO_NORM {
            return alloc::vec![0.0; y.len()];
        }
        let scale = self.radial.eval(r) / r;
        y.iter().map(|v| v * scale).collect()
    }
}

pub fn radial_h_oracle(norms_x: &[f64], norms_y: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    Ok(RadialTransport::new(norms_x, norms_y)?.eval(y))
}
