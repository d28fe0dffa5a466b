//! JSON outputs: `metrics.json`, `history.json`, `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gtn_core::net::History;
use gtn_core::MetricsReport;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};

pub const SOFTWARE: &str = concat!("gtn-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    pub value: f64,
    pub n: usize,
    pub seed: u64,
}

pub fn metrics_json(report: &MetricsReport) -> BTreeMap<String, MetricJson> {
    report
        .iter()
        .map(|(k, e)| (k.to_string(), MetricJson { value: e.value, n: e.n, seed: e.seed }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochJson {
    pub epoch: usize,
    pub train_loss: Option<f64>,
    pub val_loss: Option<f64>,
}

/// Per-epoch losses; NaN (a diverged epoch) is written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryJson {
    pub best_epoch: usize,
    pub best_val_loss: Option<f64>,
    pub stopped_early: bool,
    pub epochs: Vec<EpochJson>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&History> for HistoryJson {
    fn from(h: &History) -> Self {
        HistoryJson {
            best_epoch: h.best_epoch,
            best_val_loss: finite(h.best_val_loss()),
            stopped_early: h.stopped_early,
            epochs: h
                .epochs
                .iter()
                .map(|e| EpochJson { epoch: e.epoch, train_loss: finite(e.train_loss), val_loss: finite(e.val_loss) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: String,
    pub command: String,
    pub config: ExperimentConfig,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub outputs: BTreeMap<String, PathBuf>,
    pub metrics: BTreeMap<String, MetricJson>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn write_metrics(path: &Path, report: &MetricsReport) -> Result<()> {
    write_json(path, &metrics_json(report))
}

pub fn read_metrics(path: &Path) -> Result<BTreeMap<String, MetricJson>> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::config("<metrics>", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gtn_core::net::EpochRecord;

    #[test]
    fn metrics_are_sorted_by_name() {
        let mut r = MetricsReport::new();
        r.insert("zeta", 1.0, 10, 7).unwrap();
        r.insert("alpha", 0.5, 10, 7).unwrap();
        let text = serde_json::to_string(&metrics_json(&r)).unwrap();
        assert_eq!(text, r#"{"alpha":{"value":0.5,"n":10,"seed":7},"zeta":{"value":1.0,"n":10,"seed":7}}"#);
    }

    #[test]
    fn nan_losses_become_null() {
        let h = History {
            epochs: vec![EpochRecord { epoch: 0, train_loss: f64::NAN, val_loss: f64::NAN, best_val_loss: f64::INFINITY }],
            best_epoch: 0,
            stopped_early: true,
        };
        let text = serde_json::to_string(&HistoryJson::from(&h)).unwrap();
        assert!(text.contains(r#""val_loss":null"#), "{text}");
        assert!(text.contains(r#""best_val_loss":null"#));
    }
}
