use alloc::vec::Vec;

use super::{argsort, check_pair_shapes};
use crate::error::Result;
use crate::points::{center, l2_norms, LabeledDataset, PointSet, ZERO_NORM};

/// Default width of a cosine tie: candidates whose cosine similarity is
/// within this distance of the best one count as tied, and the tie goes to
/// the earliest (smallest-norm) of them.
///
/// With an exact argmax in double precision the nearest direction always
/// wins regardless of norm, so radii get paired at random and a trained map
/// piles its mass onto a ring. A tolerance of `1e-4` (about 0.014 rad)
/// leaves room for the norm order to act.
pub const COSINE_TIE_TOLERANCE: f64 = 1e-4;

/// Knobs of the greedy matcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions {
    /// Cosine similarities within this distance of the maximum are ties.
    pub tie_tolerance: f64,
    /// Reject `d_x` unless its mean is (numerically) the origin.
    pub require_centered: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { tie_tolerance: COSINE_TIE_TOLERANCE, require_centered: false }
    }
}

/// Greedy cosine-similarity labeling of centered samples.
///
/// Both samples are sorted ascending by Euclidean norm (equal norms keep row
/// order). Source points are visited in that order; each takes the remaining
/// target with the largest cosine similarity and removes it. Ties (cosines
/// within `tie_tolerance` of the best) go to the smallest-norm target. A row
/// with norm below [`ZERO_NORM`] has cosine 0 against everything, so a zero
/// source takes the smallest remaining target.
///
/// The scan is exact, `O(n^2 d)`. Pairs are returned in the order they were
/// formed.
pub fn label_greedy_cosine(d_x: &PointSet, d_y: &PointSet) -> Result<LabeledDataset> {
    label_greedy_cosine_with(d_x, d_y, &GreedyOptions::default())
}

pub fn label_greedy_cosine_with(d_x: &PointSet, d_y: &PointSet, opts: &GreedyOptions) -> Result<LabeledDataset> {
    check_pair_shapes(d_x, d_y)?;
    check_options(d_x, opts)?;
    let order_x = argsort(&l2_norms(d_x));
    let order_y = argsort(&l2_norms(d_y));
    greedy_in_order(d_x, d_y, &order_x, &order_y, opts.tie_tolerance)
}

/// The greedy matcher without the norm sort: rows are visited in input order.
///
/// Only useful to show what the sort buys; real labeling should use
/// [`label_greedy_cosine`].
pub fn label_greedy_cosine_unsorted(d_x: &PointSet, d_y: &PointSet, opts: &GreedyOptions) -> Result<LabeledDataset> {
    check_pair_shapes(d_x, d_y)?;
    check_options(d_x, opts)?;
    let order: Vec<usize> = (0..d_x.n()).collect();
    greedy_in_order(d_x, d_y, &order, &order, opts.tie_tolerance)
}

fn check_options(d_x: &PointSet, opts: &GreedyOptions) -> Result<()> {
    if !(opts.tie_tolerance >= 0.0 && opts.tie_tolerance < 2.0) {
        return Err(crate::error::invalid("tie_tolerance", "must lie in [0, 2)"));
    }
    if opts.require_centered {
        let scale = d_x.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if d_x.mean().iter().any(|m| m.abs() > 1e-9 * scale) {
            return Err(crate::error::invalid("d_x", "data must be centered; use label_centered"));
        }
    }
    Ok(())
}

fn unit_rows(points: &PointSet, order: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(order.len() * points.d());
    for &i in order {
        let row = points.row(i);
        let r = crate::points::norm(row);
        if r <= ZERO_NORM {
            out.extend(core::iter::repeat(0.0).take(row.len()));
        } else {
            out.extend(row.iter().map(|v| v / r));
        }
    }
    out
}

fn greedy_in_order(
    d_x: &PointSet,
    d_y: &PointSet,
    order_x: &[usize],
    order_y: &[usize],
    tolerance: f64,
) -> Result<LabeledDataset> {
    let d = d_x.d();
    // Remaining targets in visiting order. Taken rows become NaN tombstones
    // (every comparison against NaN is false) and are compacted away once
    // they outnumber the live rows.
    let mut remaining = unit_rows(d_x, order_x);
    let mut remaining_idx: Vec<usize> = order_x.to_vec();
    let mut dead = 0usize;
    let sources_unit = unit_rows(d_y, order_y);

    let mut matched = Vec::with_capacity(order_y.len());
    for uy in sources_unit.chunks_exact(d) {
        let best = best_candidate(&remaining, uy, tolerance);
        matched.push(remaining_idx[best]);
        remaining[best * d..(best + 1) * d].fill(f64::NAN);
        dead += 1;
        if 2 * dead > remaining_idx.len() {
            compact(&mut remaining, &mut remaining_idx, d);
            dead = 0;
        }
    }
    LabeledDataset::new(d_y.select(order_y), d_x.select(&matched))
}

fn compact(rows: &mut Vec<f64>, idx: &mut Vec<usize>, d: usize) {
    let mut w = 0;
    for r in 0..idx.len() {
        if !rows[r * d].is_nan() {
            rows.copy_within(r * d..(r + 1) * d, w * d);
            idx[w] = idx[r];
            w += 1;
        }
    }
    rows.truncate(w * d);
    idx.truncate(w);
}

fn best_candidate(remaining: &[f64], uy: &[f64], tolerance: f64) -> usize {
    match uy.len() {
        1 => first_within(remaining, 1, tolerance, |x| x[0] * uy[0]),
        2 => first_within(remaining, 2, tolerance, |x| x[0] * uy[0] + x[1] * uy[1]),
        d => first_within(remaining, d, tolerance, |x| crate::points::dot(x, uy)),
    }
}

/// Index of the first row whose cosine is at least `max - tolerance`.
#[inline(always)]
fn first_within(rows: &[f64], d: usize, tolerance: f64, cos: impl Fn(&[f64]) -> f64) -> usize {
    let mut max = f64::NEG_INFINITY;
    for x in rows.chunks_exact(d) {
        let c = cos(x);
        // NaN tombstones never raise the maximum
        max = if c > max { c } else { max };
    }
    let threshold = max - tolerance;
    rows.chunks_exact(d)
        .position(|x| cos(x) >= threshold)
        .expect("no remaining candidates")
}

/// Greedy labels on centered targets, plus the mean that was removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredLabels {
    /// Sources paired with centered targets.
    pub pairs: LabeledDataset,
    pub mean: Vec<f64>,
}

impl CenteredLabels {
    /// Pairs with the mean added back to every target.
    pub fn uncentered(&self) -> LabeledDataset {
        LabeledDataset {
            sources: self.pairs.sources.clone(),
            targets: self.pairs.targets.translate(&self.mean),
            clusters: self.pairs.clusters.clone(),
        }
    }
}

/// Centers `d_x` about its mean and labels it against `d_y`, which is taken
/// to be centered already (a standard normal sample).
pub fn label_centered(d_x: &PointSet, d_y: &PointSet, opts: &GreedyOptions) -> Result<CenteredLabels> {
    check_pair_shapes(d_x, d_y)?;
    let (centered, mean) = center(d_x);
    Ok(CenteredLabels { pairs: label_greedy_cosine_with(&centered, d_y, opts)?, mean })
}
