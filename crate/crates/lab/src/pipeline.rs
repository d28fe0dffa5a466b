//! The experiment pipeline and the subcommands built from its pieces.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gtn_core::eval::{
    coverage_score, energy_distance_capped, grid_chi_square, interpolation_continuity, ks_statistic, linspace,
    manifold_distance_swiss, monotonicity_violations, ood_fraction, GridSpec, KsReference, ENERGY_CAP,
};
use gtn_core::labeling::{
    fit_clusters, label_1d, label_clustered, label_greedy_cosine_with, ClusterModel, GreedyOptions,
};
use gtn_core::net::{generate_with_sources, train, train_with_validation, History, Mlp, Source};
use gtn_core::points::norm;
use gtn_core::rng::{sample_standard_normal, RngState};
use gtn_core::synth::{
    sample_disjoint_uniform, sample_swiss_roll_theta, sample_uniform_box, swiss_roll_embed, DisjointUniformSpec,
    SwissRollSpec, UniformBoxSpec,
};
use gtn_core::{LabeledDataset, MetricsReport, PointSet};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{Experiment, ExperimentConfig, LARGE_N};
use crate::csvio::{read_pairs, read_points, read_table, write_pairs, write_points};
use crate::error::{LabError, Result};
use crate::manifest::{metrics_json, write_json, write_metrics, HistoryJson, RunManifest, SOFTWARE};
use crate::model_file::{load_model, save_model};
use crate::plot::Scatter;

/// Grid resolution for swiss-roll manifold distances.
pub const MANIFOLD_GRID: usize = 2000;
/// Distance from the curve beyond which a generated point is off the manifold.
pub const MANIFOLD_THRESHOLD: f64 = 0.05;
/// Slack around `[theta_min, theta_max]` and around the boxes.
pub const THETA_SLACK: f64 = 0.1;
pub const BOX_MARGIN: f64 = 0.05;
pub const CHI_BINS: usize = 10;
pub const NULL_SEEDS: usize = 20;
pub const COVERAGE_RADIUS: f64 = 0.05;
pub const INTERP_PAIRS: usize = 10;

/// The two boxes of the `disjoint_uniform` preset.
pub fn disjoint_spec() -> DisjointUniformSpec {
    DisjointUniformSpec::two_unit_squares(1.0).expect("valid boxes")
}

/// Independent random streams, one per pipeline phase, all derived from the
/// run seed. Changing one phase's draws leaves the others untouched.
pub struct Streams {
    pub data: RngState,
    pub val_data: RngState,
    pub label: RngState,
    pub val_label: RngState,
    pub train: RngState,
    pub sample: RngState,
    pub eval: RngState,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let mut master = RngState::new(seed);
        Streams {
            data: master.fork(),
            val_data: master.fork(),
            label: master.fork(),
            val_label: master.fork(),
            train: master.fork(),
            sample: master.fork(),
            eval: master.fork(),
        }
    }
}

/// Draws `n` rows from a synthetic preset's data distribution.
pub fn synthetic_data(experiment: Experiment, rng: &mut RngState, n: usize) -> Result<PointSet> {
    Ok(match experiment {
        Experiment::Swiss1d => sample_swiss_roll_theta(rng, n, &SwissRollSpec::default()),
        Experiment::Uniform2d => sample_uniform_box(rng, n, &UniformBoxSpec::unit(2)),
        Experiment::DisjointUniform => sample_disjoint_uniform(rng, n, &disjoint_spec()).0,
        Experiment::Custom => {
            return Err(LabError::Usage("the custom experiment has no built-in distribution".into()))
        }
    })
}

/// Training and validation rows.
pub fn load_data(cfg: &ExperimentConfig, streams: &mut Streams) -> Result<(PointSet, PointSet)> {
    if cfg.experiment != Experiment::Custom {
        let train = synthetic_data(cfg.experiment, &mut streams.data, cfg.n_train)?;
        let val = synthetic_data(cfg.experiment, &mut streams.val_data, cfg.n_val)?;
        return Ok((train, val));
    }
    let path = cfg.io.data.as_deref().expect("validated");
    let all = read_points(path)?;
    if 2 * cfg.n_val >= all.n() {
        return Err(LabError::config(
            "n_val",
            format!("{} validation rows leave too few of the {} rows for training", cfg.n_val, all.n()),
        ));
    }
    let perm = streams.val_data.permutation(all.n());
    let mut val_idx = perm[..cfg.n_val].to_vec();
    let mut train_idx = perm[cfg.n_val..].to_vec();
    if train_idx.len() > cfg.n_train {
        eprintln!("note: using a random subset of {} of {} training rows", cfg.n_train, train_idx.len());
        streams.data.shuffle(&mut train_idx);
        train_idx.truncate(cfg.n_train);
    }
    val_idx.sort_unstable();
    train_idx.sort_unstable();
    Ok((all.select(&train_idx), all.select(&val_idx)))
}

/// Labeled pairs in the network's coordinates plus what is needed to map
/// network outputs back to data coordinates.
#[derive(Debug, Clone)]
pub struct Labels {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub scale: Vec<f64>,
    pub offset: Vec<f64>,
    pub source: Source,
    pub clusters: Option<ClusterModel>,
}

impl Labels {
    /// Training pairs with targets in data coordinates.
    pub fn train_in_data_coords(&self) -> LabeledDataset {
        let mut data = self.train.targets.as_slice().to_vec();
        let d = self.scale.len();
        for (i, v) in data.iter_mut().enumerate() {
            *v = *v * self.scale[i % d] + self.offset[i % d];
        }
        LabeledDataset {
            sources: self.train.sources.clone(),
            targets: PointSet::from_flat(d, data).expect("finite"),
            clusters: self.train.clusters.clone(),
        }
    }
}

fn to_model_coords(x: &PointSet, scale: &[f64], offset: &[f64]) -> PointSet {
    let d = x.d();
    let data = x.as_slice().iter().enumerate().map(|(i, v)| (v - offset[i % d]) / scale[i % d]).collect();
    PointSet::from_flat(d, data).expect("finite")
}

fn label_plain(x: &PointSet, rng: &mut RngState, opts: &GreedyOptions) -> gtn_core::Result<LabeledDataset> {
    let y = sample_standard_normal(rng, x.n(), x.d());
    if x.d() == 1 {
        label_1d(x, &y)
    } else {
        label_greedy_cosine_with(x, &y, opts)
    }
}

fn center_and_scale(x: &PointSet, rescale: bool) -> (Vec<f64>, Vec<f64>) {
    let offset = x.mean();
    let scale = if rescale {
        x.std().into_iter().map(|s| if s > 0.0 { s } else { 1.0 }).collect()
    } else {
        vec![1.0; x.d()]
    };
    (scale, offset)
}

/// Labels the training and validation rows side by side.
///
/// Without clusters both sets are centered with the training mean (and
/// optionally divided by the training std); 1D data is rank matched, higher
/// dimensions use the greedy matcher. With `k` clusters the clusters are
/// fitted on the training rows and validation rows go to the nearest center.
pub fn label_sets(
    cfg: &ExperimentConfig,
    train_x: &PointSet,
    val_x: &PointSet,
    streams: &mut Streams,
    pool: &ThreadPool,
) -> Result<Labels> {
    if train_x.d() != val_x.d() {
        return Err(LabError::Dimension { what: "validation data".into(), expected: train_x.d(), found: val_x.d() });
    }
    let opts = GreedyOptions { tie_tolerance: cfg.labeling.tie_tolerance, ..GreedyOptions::default() };
    let (label_rng, val_rng) = (&mut streams.label, &mut streams.val_label);
    match cfg.clusters {
        None => {
            let (scale, offset) = center_and_scale(train_x, cfg.labeling.rescale);
            let xt = to_model_coords(train_x, &scale, &offset);
            let xv = to_model_coords(val_x, &scale, &offset);
            let (train, val) = pool.join(|| label_plain(&xt, label_rng, &opts), || label_plain(&xv, val_rng, &opts));
            Ok(Labels { train: train?, val: val?, scale, offset, source: Source::StandardNormal, clusters: None })
        }
        Some(k) => {
            if train_x.d() < 2 {
                return Err(LabError::config("clusters", "clustered labeling needs d >= 2"));
            }
            let model = fit_clusters(label_rng, train_x, k, cfg.labeling.kmeans_iters)?;
            let val_model = model.reassign(val_x)?;
            let (train, val) = pool.join(
                || label_clustered(label_rng, train_x, &model, &opts),
                || label_clustered(val_rng, val_x, &val_model, &opts),
            );
            let (train, model) = train?;
            let (val, _) = val?;
            let d = train_x.d();
            let source =
                Source::Mixture { weights: model.weights.clone(), means: model.centers.clone(), stds: model.stds.clone() };
            Ok(Labels { train, val, scale: vec![1.0; d], offset: vec![0.0; d], source, clusters: Some(model) })
        }
    }
}

/// Builds, trains, and finishes the generator for `labels`.
pub fn fit_model(cfg: &ExperimentConfig, labels: &Labels, rng: &mut RngState) -> Result<(Mlp, History)> {
    let model = Mlp::from_seed(cfg.mlp_config(labels.train.d()))?;
    let (mut model, history) = train_with_validation(model, &labels.train, &labels.val, &cfg.train_config(), rng)?;
    model.set_source(labels.source.clone());
    model.set_output_transform(labels.scale.clone(), labels.offset.clone())?;
    Ok((model, history))
}

fn check_dim(what: &str, expected: usize, points: &PointSet) -> Result<()> {
    if points.d() != expected {
        return Err(LabError::Dimension { what: what.into(), expected, found: points.d() });
    }
    Ok(())
}

fn fraction(points: &PointSet, keep: impl Fn(&[f64]) -> bool) -> f64 {
    points.rows().filter(|r| keep(r)).count() as f64 / points.n().max(1) as f64
}

/// Distances of embedded swiss-roll points to the curve, computed in chunks.
pub fn swiss_distances(theta: &PointSet, pool: &ThreadPool) -> Result<Vec<f64>> {
    let embedded = swiss_roll_embed(theta)?;
    let spec = SwissRollSpec::default();
    let chunks: Vec<PointSet> = embedded
        .as_slice()
        .chunks(2 * 512)
        .map(|c| PointSet::from_flat(2, c.to_vec()).expect("finite"))
        .collect();
    let parts: Vec<gtn_core::Result<Vec<f64>>> =
        pool.install(|| chunks.par_iter().map(|c| manifold_distance_swiss(c, &spec, MANIFOLD_GRID)).collect());
    let mut out = Vec::with_capacity(theta.n());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Mean energy distance between two independent draws of `n` rows from a
/// synthetic preset, over [`NULL_SEEDS`] seeds taken from `rng`.
pub fn energy_null_mean(experiment: Experiment, n: usize, rng: &mut RngState, pool: &ThreadPool) -> Result<f64> {
    let seeds: Vec<u64> = (0..NULL_SEEDS).map(|_| rng.next_u64()).collect();
    let values: Vec<Result<f64>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let mut r = RngState::new(s);
                let a = synthetic_data(experiment, &mut r, n)?;
                let b = synthetic_data(experiment, &mut r, n)?;
                Ok(energy_distance_capped(&a, &b, ENERGY_CAP, &mut r)?)
            })
            .collect()
    });
    let mut total = 0.0;
    for v in values {
        total += v?;
    }
    Ok(total / NULL_SEEDS as f64)
}

/// What a metric battery gets to look at.
pub struct EvalInputs<'a> {
    pub experiment: Experiment,
    pub samples: &'a PointSet,
    /// Data to compare against. Synthetic presets draw a fresh sample when absent.
    pub reference: Option<&'a PointSet>,
    pub model: Option<&'a Mlp>,
    pub seed: u64,
}

/// Runs the metric battery of the experiment.
///
/// * swiss1d: `ks_theta`, `inside_theta_range`, `ood_fraction`,
///   `manifold_distance_mean`, and with a model `monotonicity_violations`,
///   `interp_max_step_20`, `interp_max_step_200`.
/// * uniform2d: `inside_fraction`, `chi_square`, `chi_square_dof`,
///   `out_of_box_fraction`, `energy_distance`, `energy_null_mean`,
///   `energy_ratio`, `coverage`.
/// * disjoint_uniform: `inside_union`, `proportion_box_k`,
///   `reference_proportion_box_k`, `max_proportion_gap`.
/// * custom: `energy_distance`, `coverage`, and `ks_x0` for 1D data.
pub fn evaluate(inputs: &EvalInputs<'_>, rng: &mut RngState, pool: &ThreadPool) -> Result<MetricsReport> {
    let samples = inputs.samples;
    let n = samples.n();
    if n == 0 {
        return Err(LabError::Usage("no generated rows to evaluate".into()));
    }
    let fresh;
    let reference = match (inputs.reference, inputs.experiment) {
        (Some(r), _) => r,
        (None, Experiment::Custom) => {
            return Err(LabError::Usage("custom evaluation needs an explicit reference CSV (--reference)".into()))
        }
        (None, e) => {
            fresh = synthetic_data(e, rng, n)?;
            &fresh
        }
    };
    check_dim("reference", samples.d(), reference)?;
    let mut report = MetricsReport::new();
    let mut put = |name: &str, v: f64| report.insert(name, v, n, inputs.seed);

    match inputs.experiment {
        Experiment::Swiss1d => {
            check_dim("swiss1d samples", 1, samples)?;
            let spec = SwissRollSpec::default();
            put("ks_theta", ks_statistic(samples, KsReference::Sample(reference))?)?;
            put(
                "inside_theta_range",
                fraction(samples, |r| r[0] > spec.theta_min - THETA_SLACK && r[0] < spec.theta_max + THETA_SLACK),
            )?;
            let dist = swiss_distances(samples, pool)?;
            put("ood_fraction", ood_fraction(&dist, MANIFOLD_THRESHOLD))?;
            put("manifold_distance_mean", dist.iter().sum::<f64>() / n as f64)?;
            let model = inputs.model.ok_or_else(|| {
                LabError::Usage("swiss1d evaluation needs the trained model (--model) for monotonicity".into())
            })?;
            put("monotonicity_violations", monotonicity_violations(model, &linspace(-3.0, 3.0, 1001))?)?;
            let (mut s20, mut s200) = (0.0f64, 0.0f64);
            for _ in 0..INTERP_PAIRS {
                let (a, b) = ([rng.normal()], [rng.normal()]);
                s20 = s20.max(interpolation_continuity(model, &a, &b, 20)?);
                s200 = s200.max(interpolation_continuity(model, &a, &b, 200)?);
            }
            put("interp_max_step_20", s20)?;
            put("interp_max_step_200", s200)?;
        }
        Experiment::Uniform2d => {
            check_dim("uniform2d samples", 2, samples)?;
            let unit = UniformBoxSpec::unit(2);
            put("inside_fraction", fraction(samples, |r| unit.contains(r, BOX_MARGIN)))?;
            let grid = GridSpec::new(CHI_BINS, unit.lows().to_vec(), unit.highs().to_vec())?;
            let chi = grid_chi_square(samples, &grid)?;
            put("chi_square", chi.statistic)?;
            put("chi_square_dof", chi.dof as f64)?;
            put("out_of_box_fraction", chi.out_of_box_fraction)?;
            let ed = energy_distance_capped(samples, reference, ENERGY_CAP, rng)?;
            let null = energy_null_mean(Experiment::Uniform2d, n, rng, pool)?;
            put("energy_distance", ed)?;
            put("energy_null_mean", null)?;
            put("energy_ratio", ed / null)?;
            put("coverage", coverage_score(samples, reference, COVERAGE_RADIUS)?)?;
        }
        Experiment::DisjointUniform => {
            check_dim("disjoint_uniform samples", 2, samples)?;
            let spec = disjoint_spec();
            let k = spec.boxes().len();
            let mut gen_counts = vec![0usize; k];
            let mut ref_counts = vec![0usize; k];
            for r in samples.rows() {
                if let Some(b) = spec.locate(r, BOX_MARGIN) {
                    gen_counts[b] += 1;
                }
            }
            for r in reference.rows() {
                if let Some(b) = spec.locate(r, BOX_MARGIN) {
                    ref_counts[b] += 1;
                }
            }
            let inside: usize = gen_counts.iter().sum();
            let ref_inside: usize = ref_counts.iter().sum();
            put("inside_union", inside as f64 / n as f64)?;
            let mut gap = 0.0f64;
            for b in 0..k {
                let p = gen_counts[b] as f64 / inside.max(1) as f64;
                let q = ref_counts[b] as f64 / ref_inside.max(1) as f64;
                put(&format!("proportion_box_{b}"), p)?;
                put(&format!("reference_proportion_box_{b}"), q)?;
                gap = gap.max((p - q).abs());
            }
            put("max_proportion_gap", gap)?;
        }
        Experiment::Custom => {
            put("energy_distance", energy_distance_capped(samples, reference, ENERGY_CAP, rng)?)?;
            let spread = reference.std().iter().sum::<f64>() / reference.d() as f64;
            put("coverage", coverage_score(samples, reference, 0.1 * spread.max(1e-12))?)?;
            if samples.d() == 1 {
                put("ks_x0", ks_statistic(samples, KsReference::Sample(reference))?)?;
            }
        }
    }
    Ok(report)
}

/// Everything a run produces, before anything is written.
pub struct RunResult {
    pub labels: Labels,
    pub model: Mlp,
    pub history: History,
    pub sources: PointSet,
    pub samples: PointSet,
    pub metrics: MetricsReport,
    pub timings: BTreeMap<String, f64>,
}

/// generate data, label, train, sample, evaluate. Nothing touches the disk
/// except reading a custom data file.
pub fn run_in_memory(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<RunResult> {
    cfg.validate()?;
    if cfg.n_train > LARGE_N {
        eprintln!("note: labeling {} rows is O(n^2) and may take a long time", cfg.n_train);
    }
    let mut streams = Streams::new(cfg.seed);
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let (train_x, val_x) = load_data(cfg, &mut streams)?;
    lap("data", &mut timings);
    let labels = label_sets(cfg, &train_x, &val_x, &mut streams, pool)?;
    lap("label", &mut timings);
    let (model, history) = fit_model(cfg, &labels, &mut streams.train)?;
    lap("train", &mut timings);
    let (sources, samples) = generate_with_sources(&model, &mut streams.sample, cfg.n_generate)?;
    lap("sample", &mut timings);
    let reference = match cfg.experiment {
        // proportions are compared with the training data
        Experiment::DisjointUniform => Some(&train_x),
        Experiment::Custom => Some(&val_x),
        _ => None,
    };
    let inputs = EvalInputs { experiment: cfg.experiment, samples: &samples, reference, model: Some(&model), seed: cfg.seed };
    let mut metrics = evaluate(&inputs, &mut streams.eval, pool)?;
    let best = history.best_val_loss();
    if best.is_finite() {
        metrics.insert("val_mse", best, labels.val.len(), cfg.seed)?;
    }
    lap("eval", &mut timings);
    Ok(RunResult { labels, model, history, sources, samples, metrics, timings })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

fn plot_name(cfg: &ExperimentConfig) -> String {
    format!("plot.{}", cfg.io.format.extension())
}

/// `run`: the whole pipeline, with every artifact written to `out_dir`.
pub fn cmd_run(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = &cfg.io.out_dir;
    ensure_dir(dir)?;
    let result = run_in_memory(cfg, pool)?;
    let started = Instant::now();
    let mut outputs = BTreeMap::new();
    let mut out = |key: &str, name: &str| {
        let p = dir.join(name);
        outputs.insert(key.to_string(), p.clone());
        p
    };
    write_points(&out("samples", "samples.csv"), &result.samples)?;
    write_pairs(&out("pairs", "pairs.csv"), &result.labels.train_in_data_coords())?;
    save_model(&out("model", "model.bin"), &result.model)?;
    write_json(&out("history", "history.json"), &HistoryJson::from(&result.history))?;
    write_metrics(&out("metrics", "metrics.json"), &result.metrics)?;

    let colors = result.sources.rows().map(norm).collect();
    let shown = if result.samples.d() > 2 {
        let data = result.samples.rows().flat_map(|r| [r[0], r[1]]).collect();
        PointSet::from_flat(2, data)?
    } else {
        result.samples.clone()
    };
    let title = format!("{}: {} generated points", cfg.experiment.name(), result.samples.n());
    Scatter::from_points(&shown, Some(colors), cfg.experiment == Experiment::Swiss1d, &title)?
        .write(&out("plot", &plot_name(cfg)), cfg.io.format)?;

    let mut timings = result.timings;
    timings.insert("write".into(), started.elapsed().as_secs_f64());
    let manifest_path = out("manifest", "manifest.json");
    let manifest = RunManifest {
        software: SOFTWARE.into(),
        command: "run".into(),
        config: cfg.clone(),
        timings,
        outputs,
        metrics: metrics_json(&result.metrics),
    };
    write_json(&manifest_path, &manifest)?;
    Ok(manifest)
}

fn data_path(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.io.data.as_deref().ok_or_else(|| LabError::Usage("missing input file (--data)".into()))
}

/// `label`: pairs for the rows of a CSV, written to `out_dir/pairs.csv` in
/// data coordinates. Returns the number of pairs.
pub fn cmd_label(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<usize> {
    let path = data_path(cfg)?;
    let mut x = read_points(path)?;
    let mut streams = Streams::new(cfg.seed);
    if x.n() > cfg.n_train {
        eprintln!("note: labeling a random subset of {} of {} rows", cfg.n_train, x.n());
        let mut idx = streams.data.permutation(x.n());
        idx.truncate(cfg.n_train);
        idx.sort_unstable();
        x = x.select(&idx);
    }
    let pairs = match cfg.clusters {
        None => {
            let (scale, offset) = center_and_scale(&x, cfg.labeling.rescale);
            let opts = GreedyOptions { tie_tolerance: cfg.labeling.tie_tolerance, ..GreedyOptions::default() };
            let train = pool.install(|| label_plain(&to_model_coords(&x, &scale, &offset), &mut streams.label, &opts))?;
            let empty = LabeledDataset::new(PointSet::empty(x.d())?, PointSet::empty(x.d())?)?;
            let labels = Labels { train, val: empty, scale, offset, source: Source::StandardNormal, clusters: None };
            labels.train_in_data_coords()
        }
        Some(k) => {
            if x.d() < 2 {
                return Err(LabError::config("clusters", "clustered labeling needs d >= 2"));
            }
            let model = fit_clusters(&mut streams.label, &x, k, cfg.labeling.kmeans_iters)?;
            let opts = GreedyOptions { tie_tolerance: cfg.labeling.tie_tolerance, ..GreedyOptions::default() };
            label_clustered(&mut streams.label, &x, &model, &opts)?.0
        }
    };
    ensure_dir(&cfg.io.out_dir)?;
    write_pairs(&cfg.io.out_dir.join("pairs.csv"), &pairs)?;
    Ok(pairs.len())
}

/// Mixture source fitted to the targets of each cluster.
fn mixture_from_pairs(pairs: &LabeledDataset, clusters: &[usize]) -> Result<Source> {
    let k = clusters.iter().max().map_or(0, |m| m + 1);
    let d = pairs.d();
    let (mut means, mut stds, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for c in 0..k {
        let idx: Vec<usize> = (0..pairs.len()).filter(|&i| clusters[i] == c).collect();
        if idx.len() < 2 {
            return Err(gtn_core::Error::ClusterTooSmall { cluster: c, size: idx.len() }.into());
        }
        let members = pairs.targets.select(&idx);
        means.extend(members.mean());
        stds.extend(members.std());
        weights.push(idx.len() as f64 / pairs.len() as f64);
    }
    Ok(Source::Mixture { weights, means: PointSet::from_flat(d, means)?, stds: PointSet::from_flat(d, stds)? })
}

/// `train`: fits a generator to a pairs CSV, holding out `val_fraction` of
/// the pairs. Writes `model.bin` and `history.json`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<(Mlp, History)> {
    let path = data_path(cfg)?;
    let pairs = read_pairs(path)?;
    let mut streams = Streams::new(cfg.seed);
    let d = pairs.d();
    let (pairs, scale, offset, source) = match &pairs.clusters {
        Some(c) => {
            let source = mixture_from_pairs(&pairs, c)?;
            (pairs.clone(), vec![1.0; d], vec![0.0; d], source)
        }
        None => {
            let (scale, offset) = center_and_scale(&pairs.targets, cfg.labeling.rescale);
            let targets = to_model_coords(&pairs.targets, &scale, &offset);
            (LabeledDataset::new(pairs.sources.clone(), targets)?, scale, offset, Source::StandardNormal)
        }
    };
    let model = Mlp::from_seed(cfg.mlp_config(d))?;
    let (mut model, history) = train(model, &pairs, &cfg.train_config(), &mut streams.train)?;
    model.set_source(source);
    model.set_output_transform(scale, offset)?;
    ensure_dir(&cfg.io.out_dir)?;
    save_model(&cfg.io.out_dir.join("model.bin"), &model)?;
    write_json(&cfg.io.out_dir.join("history.json"), &HistoryJson::from(&history))?;
    Ok((model, history))
}

/// `sample`: `n` generated rows from a saved model into `out_dir/samples.csv`.
pub fn cmd_sample(model_path: &Path, n: usize, seed: u64, out_dir: &Path) -> Result<PathBuf> {
    let model = load_model(model_path)?;
    let mut rng = RngState::new(seed);
    let (_, samples) = generate_with_sources(&model, &mut rng, n)?;
    ensure_dir(out_dir)?;
    let path = out_dir.join("samples.csv");
    write_points(&path, &samples)?;
    Ok(path)
}

/// `eval`: the metric battery on a samples CSV, written to `out_dir/metrics.json`.
pub fn cmd_eval(cfg: &ExperimentConfig, model_path: Option<&Path>, pool: &ThreadPool) -> Result<MetricsReport> {
    let path = data_path(cfg)?;
    let samples = read_points(path)?;
    let reference = cfg.io.reference.as_deref().map(read_points).transpose()?;
    let model_path = model_path.map(Path::to_path_buf).or_else(|| {
        // a run directory keeps the model next to its samples
        let sibling = path.parent().unwrap_or(Path::new(".")).join("model.bin");
        (cfg.experiment == Experiment::Swiss1d && sibling.exists()).then_some(sibling)
    });
    let model = model_path.as_deref().map(load_model).transpose()?;
    let inputs =
        EvalInputs { experiment: cfg.experiment, samples: &samples, reference: reference.as_ref(), model: model.as_ref(), seed: cfg.seed };
    let mut rng = Streams::new(cfg.seed).eval;
    let report = evaluate(&inputs, &mut rng, pool)?;
    ensure_dir(&cfg.io.out_dir)?;
    write_metrics(&cfg.io.out_dir.join("metrics.json"), &report)?;
    Ok(report)
}

/// `plot`: a scatter of a samples or pairs CSV into `out_dir/plot.{png,svg}`.
pub fn cmd_plot(cfg: &ExperimentConfig, dims: Option<(usize, usize)>) -> Result<PathBuf> {
    let path = data_path(cfg)?;
    let table = read_table(path)?;
    let title = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
    let scatter = Scatter::from_table(&table, dims, cfg.experiment == Experiment::Swiss1d, &title)?;
    ensure_dir(&cfg.io.out_dir)?;
    let out = cfg.io.out_dir.join(plot_name(cfg));
    scatter.write(&out, cfg.io.format)?;
    Ok(out)
}
