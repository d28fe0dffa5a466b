//! Experiment runner for the `gtn-core` generator: synthetic presets and CSV
//! ingestion, the label/train/sample/eval pipeline, and the files it writes.

pub mod config;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod model_file;
pub mod pipeline;
pub mod plot;
pub mod threads;

pub use config::{Experiment, ExperimentConfig, Overrides, PlotFormat};
pub use error::{LabError, Result};
