//! Training pairs `(y, x_y)` for the generator.
//!
//! [`label_1d`] is exact rank matching. [`label_greedy_cosine`] is the
//! multivariate greedy matcher: both samples are sorted by distance from the
//! origin, and each source point in turn takes the remaining target point with
//! the largest cosine similarity. [`label_clustered`] runs the greedy matcher
//! separately inside each k-means cluster, for data whose support falls
//! apart into pieces.

mod greedy;
mod kmeans;

pub use greedy::{
    label_centered, label_greedy_cosine, label_greedy_cosine_unsorted, label_greedy_cosine_with,
    CenteredLabels, GreedyOptions, COSINE_TIE_TOLERANCE,
};
pub use kmeans::{fit_clusters, label_clustered, ClusterModel};

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::points::{LabeledDataset, PointSet};

/// Indices of `values` in ascending order; equal values keep index order.
pub(crate) fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

pub(crate) fn check_pair_shapes(d_x: &PointSet, d_y: &PointSet) -> Result<()> {
    if d_x.n() != d_y.n() || d_x.d() != d_y.d() {
        return Err(Error::ShapeMismatch {
            what: "labeling samples",
            left: (d_x.n(), d_x.d()),
            right: (d_y.n(), d_y.d()),
        });
    }
    Ok(())
}

/// Rank matching in one dimension: the i-th smallest `y` gets the i-th
/// smallest `x`. Pairs come back in ascending `y` order.
pub fn label_1d(d_x: &PointSet, d_y: &PointSet) -> Result<LabeledDataset> {
    if d_x.d() != 1 || d_y.d() != 1 {
        return Err(invalid("1D labeling", "both samples must have exactly one column"));
    }
    check_pair_shapes(d_x, d_y)?;
    let xs = argsort(d_x.as_slice());
    let ys = argsort(d_y.as_slice());
    LabeledDataset::new(d_y.select(&ys), d_x.select(&xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_standard_normal, RngState};
    use crate::synth::{analytic_h_normal_to_uniform, sample_uniform_box, UniformBoxSpec};

    #[test]
    fn rank_matching_example() {
        let x = PointSet::from_column(&[3.0, 1.0, 2.0]).unwrap();
        let y = PointSet::from_column(&[0.5, -1.0, 0.0]).unwrap();
        let pairs = label_1d(&x, &y).unwrap();
        assert_eq!(pairs.sources.as_slice(), &[-1.0, 0.0, 0.5]);
        assert_eq!(pairs.targets.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn identity_when_samples_equal() {
        let x = PointSet::from_column(&[0.2, -4.0, 9.0, 1.5]).unwrap();
        let pairs = label_1d(&x, &x).unwrap();
        assert_eq!(pairs.sources, pairs.targets);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let x = PointSet::from_column(&[1.0, 2.0]).unwrap();
        let y = PointSet::from_column(&[1.0]).unwrap();
        assert!(matches!(label_1d(&x, &y), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn rank_matching_tracks_normal_cdf() {
        let y = sample_standard_normal(&mut RngState::new(21), 100_000, 1);
        let x = sample_uniform_box(&mut RngState::new(22), 100_000, &UniformBoxSpec::unit(1));
        let pairs = label_1d(&x, &y).unwrap();
        let mut worst: f64 = 0.0;
        for (yv, xv) in pairs.sources.as_slice().iter().zip(pairs.targets.as_slice()) {
            if yv.abs() <= 2.0 {
                worst = worst.max((xv - analytic_h_normal_to_uniform(*yv)).abs());
            }
        }
        assert!(worst < 0.01, "worst deviation {worst}");
    }

    #[test]
    fn rank_matching_is_monotone() {
        let y = sample_standard_normal(&mut RngState::new(3), 500, 1);
        let x = sample_standard_normal(&mut RngState::new(4), 500, 1);
        let pairs = label_1d(&x, &y).unwrap();
        assert!(pairs.sources.as_slice().windows(2).all(|w| w[0] <= w[1]));
        assert!(pairs.targets.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }
}
