//! Distribution-level checks for generated samples.
//!
//! Classical two-sample statistics (Kolmogorov–Smirnov, Pearson chi-square
//! on a grid, energy distance, nearest-neighbour coverage) plus two checks
//! on the learned map itself: monotonicity in 1D and the largest jump along
//! a straight line of inputs.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math;
use crate::net::Mlp;
use crate::points::{distance, squared_distance, PointSet};
use crate::rng::RngState;
use crate::synth::SwissRollSpec;

/// What a one-dimensional sample is compared against.
#[derive(Clone, Copy)]
pub enum KsReference<'a> {
    /// An analytic CDF.
    Cdf(&'a dyn Fn(f64) -> f64),
    /// A second sample.
    Sample(&'a PointSet),
}

fn sorted_column(p: &PointSet, what: &'static str) -> Result<Vec<f64>> {
    if p.d() != 1 {
        return Err(invalid(what, "expected a single column"));
    }
    if p.n() < 10 {
        return Err(Error::TooFewSamples { what, needed: 10, found: p.n() });
    }
    let mut v = p.as_slice().to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Supremum distance between the empirical CDF of `sample` and the reference.
pub fn ks_statistic(sample: &PointSet, reference: KsReference<'_>) -> Result<f64> {
    let a = sorted_column(sample, "KS sample")?;
    match reference {
        KsReference::Cdf(cdf) => {
            let n = a.len() as f64;
            let mut d: f64 = 0.0;
            for (i, &x) in a.iter().enumerate() {
                let f = cdf(x);
                d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
            }
            Ok(d)
        }
        KsReference::Sample(other) => {
            let b = sorted_column(other, "KS reference")?;
            let (n, m) = (a.len() as f64, b.len() as f64);
            let (mut i, mut j) = (0, 0);
            let mut d: f64 = 0.0;
            while i < a.len() && j < b.len() {
                let v = if a[i] <= b[j] { a[i] } else { b[j] };
                while i < a.len() && a[i] <= v {
                    i += 1;
                }
                while j < b.len() && b[j] <= v {
                    j += 1;
                }
                d = d.max((i as f64 / n - j as f64 / m).abs());
            }
            Ok(d)
        }
    }
}

/// Regular grid over an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub bins_per_axis: usize,
    pub lows: Vec<f64>,
    pub highs: Vec<f64>,
}

impl GridSpec {
    pub fn new(bins_per_axis: usize, lows: Vec<f64>, highs: Vec<f64>) -> Result<Self> {
        if bins_per_axis < 2 {
            return Err(invalid("bins_per_axis", "must be at least 2"));
        }
        if lows.is_empty() || lows.len() != highs.len() || lows.iter().zip(&highs).any(|(l, h)| !(l < h)) {
            return Err(invalid("grid", "need lows < highs, one per axis"));
        }
        Ok(Self { bins_per_axis, lows, highs })
    }

    pub fn cells(&self) -> usize {
        self.bins_per_axis.pow(self.lows.len() as u32)
    }

    /// Flat cell index, or `None` outside the (closed) box.
    pub fn cell_of(&self, p: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for ((v, l), h) in p.iter().zip(&self.lows).zip(&self.highs) {
            if !(*v >= *l && *v <= *h) {
                return None;
            }
            let t = (v - l) / (h - l) * self.bins_per_axis as f64;
            let b = (math::floor(t) as usize).min(self.bins_per_axis - 1);
            idx = idx * self.bins_per_axis + b;
        }
        Some(idx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub out_of_box_fraction: f64,
}

/// Pearson chi-square of the in-box points against equal cell counts.
/// Points outside the box are only counted in `out_of_box_fraction`.
pub fn grid_chi_square(sample: &PointSet, grid: &GridSpec) -> Result<ChiSquare> {
    if sample.is_empty() {
        return Err(Error::TooFewSamples { what: "chi-square", needed: 1, found: 0 });
    }
    if sample.d() != grid.lows.len() {
        return Err(invalid("grid", "dimension differs from the sample"));
    }
    let cells = grid.cells();
    let mut counts = alloc::vec![0usize; cells];
    let mut outside = 0usize;
    for p in sample.rows() {
        match grid.cell_of(p) {
            Some(c) => counts[c] += 1,
            None => outside += 1,
        }
    }
    let inside = sample.n() - outside;
    let expected = inside as f64 / cells as f64;
    let statistic = if inside == 0 {
        0.0
    } else {
        counts.iter().map(|&c| (c as f64 - expected) * (c as f64 - expected) / expected).sum()
    };
    Ok(ChiSquare {
        statistic,
        dof: cells - 1,
        out_of_box_fraction: outside as f64 / sample.n() as f64,
    })
}

/// Distance from points in the plane to the swiss-roll curve
/// `θ (cos θ, sin θ)`, θ restricted to the sampled range.
///
/// A global θ-grid picks the closest sample, then golden-section search on
/// the two neighbouring grid intervals refines it. The grid must be fine
/// enough that neighbouring spiral arms do not fall between two nodes.
#[derive(Debug, Clone)]
pub struct SwissRollDistance {
    thetas: Vec<f64>,
    curve: Vec<[f64; 2]>,
}

impl SwissRollDistance {
    pub fn new(spec: &SwissRollSpec, grid_resolution: usize) -> Result<Self> {
        if grid_resolution < 2 {
            return Err(invalid("grid_resolution", "must be at least 2"));
        }
        let step = (spec.theta_max - spec.theta_min) / (grid_resolution - 1) as f64;
        let thetas: Vec<f64> = (0..grid_resolution).map(|i| spec.theta_min + step * i as f64).collect();
        let curve = thetas.iter().map(|&t| SwissRollSpec::embed_point(t)).collect();
        Ok(Self { thetas, curve })
    }

    pub fn distance(&self, p: &[f64]) -> f64 {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.curve.iter().enumerate() {
            let d = squared_distance(c, p);
            if d < best.1 {
                best = (i, d);
            }
        }
        let last = self.thetas.len() - 1;
        let lo = self.thetas[best.0.saturating_sub(1)];
        let hi = self.thetas[(best.0 + 1).min(last)];
        let refined = golden_section_min(lo, hi, |t| squared_distance(&SwissRollSpec::embed_point(t), p));
        math::sqrt(best.1.min(refined))
    }
}

/// Minimum value of `f` on `[lo, hi]`, assuming one local minimum there.
fn golden_section_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(lo)).min(f(hi))
}

/// [`SwissRollDistance`] for every row of a 2D point set.
pub fn manifold_distance_swiss(points: &PointSet, spec: &SwissRollSpec, grid_resolution: usize) -> Result<Vec<f64>> {
    if points.d() != 2 {
        return Err(invalid("manifold distance", "points must be two-dimensional"));
    }
    let oracle = SwissRollDistance::new(spec, grid_resolution)?;
    Ok(points.rows().map(|p| oracle.distance(p)).collect())
}

/// Share of distances above `threshold`.
pub fn ood_fraction(distances: &[f64], threshold: f64) -> f64 {
    if distances.is_empty() {
        return 0.0;
    }
    distances.iter().filter(|d| **d > threshold).count() as f64 / distances.len() as f64
}

fn mean_pairwise(a: &PointSet, b: &PointSet) -> f64 {
    let mut total = 0.0;
    for x in a.rows() {
        let mut row = 0.0;
        for y in b.rows() {
            row += distance(x, y);
        }
        total += row;
    }
    total / (a.n() as f64 * b.n() as f64)
}

/// `2 E|A-B| - E|A-A'| - E|B-B'|` with every mean taken over all ordered
/// pairs, diagonal included. Zero for identical samples.
pub fn energy_distance(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.d() != b.d() {
        return Err(Error::ShapeMismatch { what: "energy distance", left: (a.n(), a.d()), right: (b.n(), b.d()) });
    }
    for (what, s) in [("energy distance sample", a), ("energy distance reference", b)] {
        if s.n() < 10 {
            return Err(Error::TooFewSamples { what, needed: 10, found: s.n() });
        }
    }
    let e = 2.0 * mean_pairwise(a, b) - mean_pairwise(a, a) - mean_pairwise(b, b);
    Ok(e.max(0.0))
}

/// Energy distance after subsampling each side to at most `cap` rows
/// (without replacement, seeded).
pub fn energy_distance_capped(a: &PointSet, b: &PointSet, cap: usize, rng: &mut RngState) -> Result<f64> {
    let mut shrink = |p: &PointSet| {
        if p.n() > cap {
            let perm = rng.permutation(p.n());
            p.select(&perm[..cap])
        } else {
            p.clone()
        }
    };
    let a = shrink(a);
    let b = shrink(b);
    energy_distance(&a, &b)
}

/// Default per-side cap for [`energy_distance_capped`].
pub const ENERGY_CAP: usize = 5000;

/// Share of held-out points whose nearest generated point lies within `radius`.
pub fn coverage_score(generated: &PointSet, held_out: &PointSet, radius: f64) -> Result<f64> {
    if generated.d() != held_out.d() {
        return Err(Error::ShapeMismatch {
            what: "coverage",
            left: (generated.n(), generated.d()),
            right: (held_out.n(), held_out.d()),
        });
    }
    if held_out.is_empty() {
        return Err(Error::TooFewSamples { what: "coverage reference", needed: 1, found: 0 });
    }
    let r2 = radius * radius;
    let covered = held_out
        .rows()
        .filter(|h| generated.rows().any(|g| squared_distance(g, h) <= r2))
        .count();
    Ok(covered as f64 / held_out.n() as f64)
}

/// Largest output jump between consecutive points of the input segment
/// `λ y_left + (1 - λ) y_right`, λ on `steps` evenly spaced values in [0, 1].
pub fn interpolation_continuity(model: &Mlp, y_left: &[f64], y_right: &[f64], steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(invalid("steps", "need at least 2"));
    }
    let d = model.config().input_dim;
    if y_left.len() != d || y_right.len() != d {
        return Err(invalid("interpolation endpoints", "dimension differs from the model input"));
    }
    let mut data = Vec::with_capacity(steps * d);
    for i in 0..steps {
        let lambda = i as f64 / (steps - 1) as f64;
        data.extend(y_left.iter().zip(y_right).map(|(l, r)| lambda * l + (1.0 - lambda) * r));
    }
    let out = model.apply(&PointSet::from_flat(d, data)?)?;
    let max_step = out
        .as_slice()
        .chunks_exact(out.d())
        .zip(out.as_slice().chunks_exact(out.d()).skip(1))
        .map(|(a, b)| distance(a, b))
        .fold(0.0, f64::max);
    Ok(max_step)
}

/// Share of adjacent pairs that decrease. Ties are not violations.
pub fn inversion_fraction(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let bad = values.windows(2).filter(|w| w[1] < w[0]).count();
    bad as f64 / (values.len() - 1) as f64
}

/// [`inversion_fraction`] of a 1D model's outputs over an ascending grid.
pub fn monotonicity_violations(model: &Mlp, grid: &PointSet) -> Result<f64> {
    let cfg = model.config();
    if cfg.input_dim != 1 || cfg.output_dim != 1 || grid.d() != 1 {
        return Err(invalid("monotonicity", "needs a 1D model and a 1D grid"));
    }
    if grid.as_slice().windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("monotonicity grid", "must be sorted ascending"));
    }
    Ok(inversion_fraction(model.apply(grid)?.as_slice()))
}

/// `count` evenly spaced values on `[lo, hi]` as a column.
pub fn linspace(lo: f64, hi: f64, count: usize) -> PointSet {
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    let data = (0..count).map(|i| lo + step * i as f64).collect();
    PointSet::from_flat_unchecked(1, data)
}
