//! Experiment configuration: presets, TOML files, flag overrides.

use std::path::{Path, PathBuf};

use gtn_core::labeling::COSINE_TIE_TOLERANCE;
use gtn_core::net::{MlpConfig, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Angles of a 1D swiss roll, `theta ~ U(1.5 pi, 4.5 pi)`.
    #[value(name = "swiss1d")]
    Swiss1d,
    /// The unit square.
    #[value(name = "uniform2d")]
    Uniform2d,
    /// Two unit squares with a gap between them.
    #[value(name = "disjoint_uniform")]
    DisjointUniform,
    /// Rows of a user CSV.
    #[value(name = "custom")]
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Swiss1d => "swiss1d",
            Experiment::Uniform2d => "uniform2d",
            Experiment::DisjointUniform => "disjoint_uniform",
            Experiment::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotFormat {
    #[default]
    Png,
    Svg,
}

impl PlotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            PlotFormat::Png => "png",
            PlotFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSettings {
    pub hidden_layers: usize,
    pub width: usize,
    pub leaky_slope: f64,
    pub batch_norm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Only used when no separate validation set exists (`train` subcommand).
    pub val_fraction: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingSettings {
    /// Cosine similarities this close to the best one count as a tie.
    pub tie_tolerance: f64,
    pub kmeans_iters: usize,
    /// Divide centered targets by their per-coordinate std before labeling.
    pub rescale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: PlotFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Training rows. For `custom` this caps the rows used from the file.
    pub n_train: usize,
    pub n_val: usize,
    pub n_generate: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    pub mlp: MlpSettings,
    pub train: TrainSettings,
    pub labeling: LabelingSettings,
    pub io: IoSettings,
}

/// Above this many rows labeling takes minutes; `custom` subsamples down to it.
pub const LARGE_N: usize = 200_000;

impl ExperimentConfig {
    pub fn preset(experiment: Experiment) -> Self {
        let tcfg = TrainConfig::default();
        let mut cfg = ExperimentConfig {
            experiment,
            seed: 7,
            n_train: 50_000,
            n_val: 10_000,
            n_generate: 10_000,
            clusters: None,
            mlp: MlpSettings { hidden_layers: 4, width: 6, leaky_slope: 0.5, batch_norm: false },
            train: TrainSettings {
                learning_rate: tcfg.learning_rate,
                batch_size: tcfg.batch_size,
                max_epochs: 2000,
                patience: tcfg.patience,
                val_fraction: tcfg.val_fraction,
                beta1: tcfg.beta1,
                beta2: tcfg.beta2,
                epsilon: tcfg.epsilon,
            },
            labeling: LabelingSettings { tie_tolerance: COSINE_TIE_TOLERANCE, kmeans_iters: 100, rescale: false },
            io: IoSettings { data: None, reference: None, out_dir: PathBuf::from("out"), format: PlotFormat::Png },
        };
        match experiment {
            Experiment::Swiss1d => {}
            Experiment::Uniform2d => {
                cfg.n_train = 100_000;
                cfg.mlp.hidden_layers = 6;
                cfg.train.patience = 100;
            }
            Experiment::DisjointUniform => {
                cfg.n_train = 20_000;
                cfg.clusters = Some(2);
                cfg.mlp.width = 32;
                cfg.train.patience = 50;
            }
            Experiment::Custom => {
                cfg.n_train = LARGE_N;
                cfg.n_val = 1_000;
                cfg.mlp.hidden_layers = 6;
            }
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("n_train", self.n_train), ("n_val", self.n_val), ("n_generate", self.n_generate)] {
            if v == 0 {
                return Err(LabError::config(field, "must be positive"));
            }
        }
        if self.experiment == Experiment::Custom && self.io.data.is_none() {
            return Err(LabError::config("io.data", "the custom experiment needs a data file (--data)"));
        }
        if self.clusters == Some(0) {
            return Err(LabError::config("clusters", "must be at least 1"));
        }
        if self.labeling.rescale && self.clusters.is_some() {
            return Err(LabError::config("labeling.rescale", "only applies without clusters"));
        }
        if self.experiment == Experiment::Swiss1d && self.clusters.is_some() {
            return Err(LabError::config("clusters", "clustered labeling needs d >= 2"));
        }
        let tol = self.labeling.tie_tolerance;
        if !(0.0..2.0).contains(&tol) {
            return Err(LabError::config("labeling.tie_tolerance", "must lie in [0, 2)"));
        }
        if self.labeling.kmeans_iters == 0 {
            return Err(LabError::config("labeling.kmeans_iters", "must be positive"));
        }
        self.mlp_config(1)
            .validate()
            .map_err(|e| LabError::config("mlp", e.to_string()))?;
        self.train_config()
            .validate()
            .map_err(|e| LabError::config("train", e.to_string()))?;
        Ok(())
    }

    pub fn mlp_config(&self, d: usize) -> MlpConfig {
        MlpConfig {
            leaky_slope: self.mlp.leaky_slope,
            batch_norm: self.mlp.batch_norm,
            seed: self.seed,
            ..MlpConfig::new(d, d, self.mlp.hidden_layers, self.mlp.width)
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            patience: t.patience,
            val_fraction: t.val_fraction,
            beta1: t.beta1,
            beta2: t.beta2,
            epsilon: t.epsilon,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Parses a TOML config. Missing fields are filled from the preset named
    /// by `experiment` (from the file, else `fallback`).
    pub fn from_toml(text: &str, fallback: Experiment) -> Result<Self> {
        Self::from_toml_as(text, fallback, None)
    }

    /// Like [`from_toml`](Self::from_toml); `force` replaces the file's experiment.
    pub fn from_toml_as(text: &str, fallback: Experiment, force: Option<Experiment>) -> Result<Self> {
        let mut file: toml::Table =
            text.parse().map_err(|e: toml::de::Error| LabError::config("<file>", one_line(&e)))?;
        let experiment = match (force, file.get("experiment")) {
            (Some(e), _) => e,
            (None, Some(v)) => v
                .clone()
                .try_into::<Experiment>()
                .map_err(|e| LabError::config("experiment", one_line(&e)))?,
            (None, None) => fallback,
        };
        file.insert("experiment".into(), toml::Value::String(experiment.name().into()));
        let base = toml::Table::try_from(Self::preset(experiment)).expect("preset serializes");
        let merged = merge(base, file);
        toml::Value::Table(merged)
            .try_into::<ExperimentConfig>()
            .map_err(|e| LabError::config("<file>", one_line(&e)))
    }

    /// Loads a `.toml` config or the config stored in a run's `manifest.json`.
    pub fn load(path: &Path, fallback: Experiment, force: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct WithConfig {
                config: ExperimentConfig,
            }
            let m: WithConfig =
                serde_json::from_str(&text).map_err(|e| LabError::config("<manifest>", e.to_string()))?;
            return Ok(match force {
                Some(e) => ExperimentConfig { experiment: e, ..m.config },
                None => m.config,
            });
        }
        Self::from_toml_as(&text, fallback, force)
    }
}

fn one_line(e: &dyn std::fmt::Display) -> String {
    e.to_string().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn merge(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (k, v) in over {
        match (base.remove(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(k, toml::Value::Table(merge(b, o)));
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
    base
}

/// Flag values that replace config entries when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub n_train: Option<usize>,
    pub n_val: Option<usize>,
    pub n_generate: Option<usize>,
    pub seed: Option<u64>,
    pub layers: Option<usize>,
    pub width: Option<usize>,
    pub lr: Option<f64>,
    pub batch_size: Option<usize>,
    pub patience: Option<usize>,
    pub max_epochs: Option<usize>,
    pub clusters: Option<usize>,
    pub tie_tolerance: Option<f64>,
    pub rescale: bool,
    pub data: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<PlotFormat>,
}

impl Overrides {
    /// Builds the config: file (or preset) first, flags on top.
    pub fn resolve(&self, config_file: Option<&Path>, fallback: Experiment) -> Result<ExperimentConfig> {
        let mut cfg = match config_file {
            Some(p) => ExperimentConfig::load(p, fallback, self.experiment)?,
            None => ExperimentConfig::preset(self.experiment.unwrap_or(fallback)),
        };
        macro_rules! set {
            ($flag:ident => $($field:tt)+) => {
                if let Some(v) = self.$flag.clone() {
                    cfg.$($field)+ = v;
                }
            };
        }
        set!(n_train => n_train);
        set!(n_val => n_val);
        set!(n_generate => n_generate);
        set!(seed => seed);
        set!(layers => mlp.hidden_layers);
        set!(width => mlp.width);
        set!(lr => train.learning_rate);
        set!(batch_size => train.batch_size);
        set!(patience => train.patience);
        set!(max_epochs => train.max_epochs);
        set!(tie_tolerance => labeling.tie_tolerance);
        set!(out_dir => io.out_dir);
        set!(format => io.format);
        if self.clusters.is_some() {
            cfg.clusters = self.clusters;
        }
        if self.data.is_some() {
            cfg.io.data = self.data.clone();
        }
        if self.reference.is_some() {
            cfg.io.reference = self.reference.clone();
        }
        if self.rescale {
            cfg.labeling.rescale = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Experiment; 4] =
        [Experiment::Swiss1d, Experiment::Uniform2d, Experiment::DisjointUniform, Experiment::Custom];

    #[test]
    fn presets_follow_the_recipes() {
        let s = ExperimentConfig::preset(Experiment::Swiss1d);
        assert_eq!((s.n_train, s.n_val, s.mlp.hidden_layers, s.mlp.width), (50_000, 10_000, 4, 6));
        assert_eq!((s.train.learning_rate, s.train.batch_size), (1e-3, 250));
        assert_eq!(s.mlp.leaky_slope, 0.5);
        let u = ExperimentConfig::preset(Experiment::Uniform2d);
        assert_eq!((u.n_train, u.mlp.hidden_layers, u.mlp.width), (100_000, 6, 6));
        assert_eq!(ExperimentConfig::preset(Experiment::DisjointUniform).clusters, Some(2));
        assert!(!u.labeling.rescale);
    }

    #[test]
    fn toml_round_trip_is_stable() {
        for e in ALL {
            let mut cfg = ExperimentConfig::preset(e);
            cfg.io.data = Some("in.csv".into());
            let text = cfg.to_toml();
            let back = ExperimentConfig::from_toml(&text, Experiment::Custom).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn partial_file_takes_preset_defaults() {
        let cfg = ExperimentConfig::from_toml("experiment = \"uniform2d\"\nseed = 3\n[train]\npatience = 5\n", Experiment::Swiss1d)
            .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.train.patience, 5);
        assert_eq!(cfg.train.batch_size, 250);
        assert_eq!(cfg.mlp.hidden_layers, 6);
    }

    #[test]
    fn unknown_field_names_the_problem() {
        let err = ExperimentConfig::from_toml("[mlp]\ndepth = 3\n", Experiment::Swiss1d).unwrap_err();
        assert!(err.to_string().contains("depth"), "{err}");
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "experiment = \"swiss1d\"\nseed = 3\nn_train = 900\n").unwrap();
        let o = Overrides { seed: Some(11), width: Some(9), ..Overrides::default() };
        let cfg = o.resolve(Some(&path), Experiment::Swiss1d).unwrap();
        assert_eq!((cfg.seed, cfg.n_train, cfg.mlp.width), (11, 900, 9));
    }

    #[test]
    fn invalid_values_are_rejected_by_field() {
        let o = Overrides { n_generate: Some(0), ..Overrides::default() };
        let err = o.resolve(None, Experiment::Swiss1d).unwrap_err();
        assert!(matches!(&err, LabError::Config { field, .. } if field == "n_generate"));
        let err = Overrides::default().resolve(None, Experiment::Custom).unwrap_err();
        assert!(matches!(&err, LabError::Config { field, .. } if field == "io.data"));
        let o = Overrides { lr: Some(-1.0), ..Overrides::default() };
        assert!(matches!(o.resolve(None, Experiment::Swiss1d), Err(LabError::Config { .. })));
    }
}
