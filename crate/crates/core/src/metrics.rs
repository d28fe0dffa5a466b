use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::error::{invalid, Result};

/// One named statistic together with the sample size and seed it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEntry {
    pub value: f64,
    pub n: usize,
    pub seed: u64,
}

/// Named scalar statistics, kept in name order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    entries: BTreeMap<String, MetricEntry>,
}

impl MetricsReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a metric. Non-finite values are rejected.
    pub fn insert(&mut self, name: &str, value: f64, n: usize, seed: u64) -> Result<()> {
        if !value.is_finite() {
            return Err(invalid("metric value", alloc::format!("`{name}` is not finite")));
        }
        self.entries.insert(name.to_string(), MetricEntry { value, n, seed });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MetricEntry> {
        self.entries.get(name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &MetricEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
