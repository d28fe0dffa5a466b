//! Generative topological networks on vector data.
//!
//! A generator is a small feedforward network trained by plain supervised
//! regression to map samples of a standard normal onto samples of a data
//! distribution. The training pairs come from rank matching (1D) or from a
//! greedy cosine-similarity matching that processes both samples in order of
//! distance from the origin (multivariate).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, CSV handling,
//! plotting and the command line live in the `gtn-lab` crate.
//!
//! Module map:
//!
//! - [`points`]: [`PointSet`], [`LabeledDataset`] and small vector utilities.
//! - [`rng`]: the seeded generator and normal sampling.
//! - [`synth`]: synthetic datasets and closed-form / empirical transport oracles.
//! - [`labeling`]: rank matching, greedy cosine matching, k-means clustering.
//! - [`net`]: the MLP, manual backpropagation, Adam and the training loop.
//! - [`eval`]: two-sample statistics and topological checks.
#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod eval;
pub mod labeling;
pub(crate) mod math;
pub mod metrics;
pub mod net;
pub mod points;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::{MetricEntry, MetricsReport};
pub use points::{LabeledDataset, PointSet};
pub use rng::RngState;
