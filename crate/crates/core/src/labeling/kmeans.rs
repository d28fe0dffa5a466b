use alloc::vec;
use alloc::vec::Vec;

use super::greedy::{label_greedy_cosine_with, GreedyOptions};
use crate::error::{invalid, Error, Result};
use crate::math;
use crate::points::{squared_distance, LabeledDataset, PointSet};
use crate::rng::{sample_diagonal_normal, RngState};

/// k-means clusters together with the per-cluster Gaussian used as the
/// source distribution for that piece of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    /// `k x d` cluster means.
    pub centers: PointSet,
    /// `k x d` per-coordinate standard deviations of the members.
    pub stds: PointSet,
    /// Cluster sizes divided by the number of rows.
    pub weights: Vec<f64>,
    /// Cluster index of every training row.
    pub assignment: Vec<usize>,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == cluster)
            .map(|(i, _)| i)
            .collect()
    }

    /// The same clusters with every row of `data` assigned to its nearest
    /// center. Used to label held-out data against already fitted clusters.
    pub fn reassign(&self, data: &PointSet) -> Result<ClusterModel> {
        if data.d() != self.centers.d() {
            return Err(Error::ShapeMismatch { what: "cluster dimension", left: (self.k(), self.centers.d()), right: (data.n(), data.d()) });
        }
        let assignment = data.rows().map(|r| nearest(&self.centers, r).0).collect();
        Ok(ClusterModel { assignment, ..self.clone() })
    }
}

fn nearest(centers: &PointSet, p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centers.rows().enumerate() {
        let dist = squared_distance(row, p);
        if dist < best.1 {
            best = (c, dist);
        }
    }
    best
}

/// k-means++ seeding: the first center is a uniform pick, each further one is
/// drawn with probability proportional to the squared distance to the closest
/// center chosen so far.
fn seed_centers(rng: &mut RngState, data: &PointSet, k: usize) -> PointSet {
    let n = data.n();
    let mut chosen = vec![rng.below(n)];
    let mut closest: Vec<f64> = data.rows().map(|r| squared_distance(r, data.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = closest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, w) in closest.iter().enumerate() {
                acc += w;
                if acc > target {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // all points coincide with a center already
            rng.below(n)
        };
        chosen.push(next);
        for (c, r) in closest.iter_mut().zip(data.rows()) {
            *c = c.min(squared_distance(r, data.row(next)));
        }
    }
    data.select(&chosen)
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Iterates until the assignment stops changing or `max_iters` rounds have
/// run. A cluster that empties out is reseeded at the point farthest from its
/// current center.
pub fn fit_clusters(rng: &mut RngState, data: &PointSet, k: usize, max_iters: usize) -> Result<ClusterModel> {
    if k == 0 {
        return Err(invalid("k", "need at least one cluster"));
    }
    if data.n() < k {
        return Err(Error::TooFewSamples { what: "k-means", needed: k, found: data.n() });
    }
    let d = data.d();
    let n = data.n();
    let mut centers = seed_centers(rng, data, k).into_flat();
    let mut assignment = vec![usize::MAX; n];

    for _ in 0..max_iters.max(1) {
        let center_set = PointSet::from_flat_unchecked(d, centers.clone());
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for (i, row) in data.rows().enumerate() {
            let (c, dist) = nearest(&center_set, row);
            dists[i] = dist;
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (row, &c) in data.rows().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(row) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                centers[c * d..(c + 1) * d].copy_from_slice(data.row(far));
                dists[far] = 0.0;
                // force another assignment pass
                assignment[far] = usize::MAX;
            } else {
                for j in 0..d {
                    centers[c * d + j] = sums[c * d + j] / counts[c] as f64;
                }
            }
        }
    }

    // final statistics from the final assignment
    let center_set = PointSet::from_flat_unchecked(d, centers);
    for (i, row) in data.rows().enumerate() {
        assignment[i] = nearest(&center_set, row).0;
    }
    let mut means = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (row, &c) in data.rows().zip(&assignment) {
        counts[c] += 1;
        for (m, v) in means[c * d..(c + 1) * d].iter_mut().zip(row) {
            *m += v;
        }
    }
    for c in 0..k {
        let cnt = counts[c].max(1) as f64;
        means[c * d..(c + 1) * d].iter_mut().for_each(|m| *m /= cnt);
    }
    let mut vars = vec![0.0; k * d];
    for (row, &c) in data.rows().zip(&assignment) {
        for j in 0..d {
            let dev = row[j] - means[c * d + j];
            vars[c * d + j] += dev * dev;
        }
    }
    let stds = vars
        .iter()
        .enumerate()
        .map(|(i, v)| math::sqrt(v / counts[i / d].max(1) as f64))
        .collect();
    let weights = counts.iter().map(|&c| c as f64 / n as f64).collect();

    Ok(ClusterModel {
        centers: PointSet::from_flat_unchecked(d, means),
        stds: PointSet::from_flat_unchecked(d, stds),
        weights,
        assignment,
    })
}

/// Greedy labeling inside each cluster.
///
/// Clusters are visited in index order. For cluster `c` with `n_c` members,
/// `n_c` source points are drawn from `N(center_c, diag(std_c^2))` using
/// `rng`; members and sources are both shifted by `-center_c`, matched with
/// [`label_greedy_cosine_with`], and shifted back. The result concatenates all
/// clusters and carries the cluster index of every pair.
pub fn label_clustered(
    rng: &mut RngState,
    data: &PointSet,
    clusters: &ClusterModel,
    opts: &GreedyOptions,
) -> Result<(LabeledDataset, ClusterModel)> {
    if clusters.assignment.len() != data.n() || clusters.centers.d() != data.d() {
        return Err(invalid("clusters", "cluster model was not fitted on this data"));
    }
    let d = data.d();
    let mut sources = PointSet::empty(d)?;
    let mut targets = PointSet::empty(d)?;
    let mut cluster_of = Vec::with_capacity(data.n());
    for c in 0..clusters.k() {
        let members = clusters.members(c);
        if members.len() < 2 {
            return Err(Error::ClusterTooSmall { cluster: c, size: members.len() });
        }
        let center = clusters.centers.row(c);
        let neg: Vec<f64> = center.iter().map(|v| -v).collect();
        let ys = sample_diagonal_normal(rng, members.len(), center, clusters.stds.row(c));
        let xs = data.select(&members);
        let pairs = label_greedy_cosine_with(&xs.translate(&neg), &ys.translate(&neg), opts)?;
        sources.extend(&pairs.sources.translate(center))?;
        targets.extend(&pairs.targets.translate(center))?;
        cluster_of.extend(core::iter::repeat(c).take(members.len()));
    }
    let labeled = LabeledDataset::new(sources, targets)?.with_clusters(cluster_of)?;
    Ok((labeled, clusters.clone()))
}
