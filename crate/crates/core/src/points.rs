//! Point sets, labeled pairs and the small vector helpers every other module uses.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Rows below this norm are treated as the origin.
pub const ZERO_NORM: f64 = 1e-12;

/// `n` finite vectors of a common dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    d: usize,
}

impl PointSet {
    /// Builds a point set from a flat row-major buffer.
    pub fn from_flat(d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() % d != 0 {
            return Err(Error::RaggedRow {
                row: data.len() / d,
                expected: d,
                found: data.len() % d,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / d, col: pos % d });
        }
        Ok(Self { data, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).ok_or(Error::ZeroDimension)?;
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::RaggedRow { row: i, expected: d, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(d, data)
    }

    /// One row per value.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub(crate) fn from_flat_unchecked(d: usize, data: Vec<f64>) -> Self {
        debug_assert!(d >= 1 && data.len() % d == 0);
        Self { data, d }
    }

    /// A point set with no rows.
    pub fn empty(d: usize) -> Result<Self> {
        Self::from_flat(d, Vec::new())
    }

    pub fn zeros(n: usize, d: usize) -> Result<Self> {
        Self::from_flat(d, vec![0.0; n * d])
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self::from_flat_unchecked(self.d, data)
    }

    /// Appends all rows of `other`.
    pub fn extend(&mut self, other: &PointSet) -> Result<()> {
        if other.d != self.d {
            return Err(Error::ShapeMismatch {
                what: "extend",
                left: (self.n(), self.d),
                right: (other.n(), other.d),
            });
        }
        self.data.extend_from_slice(&other.data);
        Ok(())
    }

    /// Adds `offset` to every row.
    pub fn translate(&self, offset: &[f64]) -> PointSet {
        assert_eq!(offset.len(), self.d, "offset dimension");
        let data = self
            .rows()
            .flat_map(|r| r.iter().zip(offset).map(|(v, o)| v + o))
            .collect();
        Self::from_flat_unchecked(self.d, data)
    }

    /// Column means.
    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for r in self.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.n().max(1) as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Population standard deviation per column.
    pub fn std(&self) -> Vec<f64> {
        let mean = self.mean();
        let mut var = vec![0.0; self.d];
        for r in self.rows() {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let n = self.n().max(1) as f64;
        var.iter().map(|s| math::sqrt(s / n)).collect()
    }
}

/// Aligned `(source, target)` pairs: `sources` row `i` is labeled with `targets` row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub sources: PointSet,
    pub targets: PointSet,
    /// Cluster index per pair when labels were built cluster by cluster.
    pub clusters: Option<Vec<usize>>,
}

impl LabeledDataset {
    pub fn new(sources: PointSet, targets: PointSet) -> Result<Self> {
        if sources.n() != targets.n() || sources.d() != targets.d() {
            return Err(Error::ShapeMismatch {
                what: "labeled pairs",
                left: (sources.n(), sources.d()),
                right: (targets.n(), targets.d()),
            });
        }
        Ok(Self { sources, targets, clusters: None })
    }

    pub fn with_clusters(mut self, clusters: Vec<usize>) -> Result<Self> {
        if clusters.len() != self.len() {
            return Err(crate::error::invalid("clusters", "one cluster index per pair required"));
        }
        self.clusters = Some(clusters);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.sources.n()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn d(&self) -> usize {
        self.sources.d()
    }

    /// Pairs at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            sources: self.sources.select(indices),
            targets: self.targets.select(indices),
            clusters: self.clusters.as_ref().map(|c| indices.iter().map(|&i| c[i]).collect()),
        }
    }

    /// Mean Euclidean distance between a source and its target.
    pub fn mean_pair_distance(&self) -> f64 {
        let total: f64 = self
            .sources
            .rows()
            .zip(self.targets.rows())
            .map(|(y, x)| distance(y, x))
            .sum();
        total / self.len().max(1) as f64
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(squared_distance(a, b))
}

/// Euclidean norm of every row.
pub fn l2_norms(points: &PointSet) -> Vec<f64> {
    points.rows().map(norm).collect()
}

/// `a·b / (|a||b|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            what: "cosine similarity",
            left: (1, a.len()),
            right: (1, b.len()),
        });
    }
    let na = norm(a);
    if na <= ZERO_NORM {
        return Err(Error::ZeroNorm { argument: "a" });
    }
    let nb = norm(b);
    if nb <= ZERO_NORM {
        return Err(Error::ZeroNorm { argument: "b" });
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Subtracts the column mean. Returns the centered points and the mean.
pub fn center(points: &PointSet) -> (PointSet, Vec<f64>) {
    let mean = points.mean();
    let neg: Vec<f64> = mean.iter().map(|m| -m).collect();
    (points.translate(&neg), mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert_eq!(
            PointSet::from_flat(2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
        assert!(matches!(
            PointSet::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::RaggedRow { row: 1, .. })
        ));
        assert_eq!(PointSet::from_flat(0, vec![]), Err(Error::ZeroDimension));
    }

    #[test]
    fn norms() {
        let p = PointSet::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(l2_norms(&p), vec![5.0]);
        let p = PointSet::from_rows(&[[0.0, 0.0]]).unwrap();
        assert_eq!(l2_norms(&p), vec![0.0]);
        let p = PointSet::from_column(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(l2_norms(&p), vec![1.0, 2.0, 0.5]);
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[-3.0, 0.0]).unwrap(), -1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_names_zero_argument() {
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroNorm { argument: "a" })
        );
        assert_eq!(
            cosine_similarity(&[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::ZeroNorm { argument: "b" })
        );
    }

    #[test]
    fn center_examples() {
        let p = PointSet::from_rows(&[[1.0, 1.0], [3.0, 3.0]]).unwrap();
        let (c, mean) = center(&p);
        assert_eq!(mean, vec![2.0, 2.0]);
        assert_eq!(c.as_slice(), &[-1.0, -1.0, 1.0, 1.0]);

        let p = PointSet::from_rows(&[[0.0, 0.0]]).unwrap();
        let (c, mean) = center(&p);
        assert_eq!(mean, vec![0.0, 0.0]);
        assert_eq!(c.as_slice(), &[0.0, 0.0]);
    }

    fn point_set(max_n: usize, d: usize) -> impl Strategy<Value = PointSet> {
        prop::collection::vec(-1e3f64..1e3, d..=max_n * d).prop_map(move |mut v| {
            v.truncate(v.len() / d * d);
            PointSet::from_flat(d, v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn centering_round_trips(p in point_set(40, 3)) {
            let (c, mean) = center(&p);
            for m in c.mean() {
                prop_assert!(m.abs() < 1e-12);
            }
            let back = c.translate(&mean);
            for (a, b) in back.as_slice().iter().zip(p.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn cosine_symmetric_and_scale_invariant(
            a in prop::collection::vec(-10f64..10.0, 3),
            b in prop::collection::vec(-10f64..10.0, 3),
            lambda in 0.01f64..100.0,
            mu in 0.01f64..100.0,
        ) {
            prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
            let ab = cosine_similarity(&a, &b).unwrap();
            let ba = cosine_similarity(&b, &a).unwrap();
            let sa: Vec<f64> = a.iter().map(|v| v * lambda).collect();
            let sb: Vec<f64> = b.iter().map(|v| v * mu).collect();
            let scaled = cosine_similarity(&sa, &sb).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((ab - scaled).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }
    }
}
