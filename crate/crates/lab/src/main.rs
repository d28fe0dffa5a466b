use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gtn_lab::pipeline::{cmd_eval, cmd_label, cmd_plot, cmd_run, cmd_sample, cmd_train};
use gtn_lab::threads::pool_from_env;
use gtn_lab::{Experiment, LabError, Overrides, PlotFormat, Result};

/// Generative topological networks: label data against normal samples,
/// train the map, sample it, and check the result.
///
/// GTN_LAB_THREADS caps the worker threads.
#[derive(Parser)]
#[command(name = "gtn-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: data, labels, training, samples, metrics, plot.
    Run(Common),
    /// Label the rows of --data; writes pairs.csv.
    Label(Common),
    /// Train on a pairs CSV (--data); writes model.bin and history.json.
    Train(Common),
    /// Sample a saved model; writes samples.csv.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "model.bin")]
        model: PathBuf,
    },
    /// Metrics for a samples CSV (--data); writes metrics.json.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Trained model, needed for the swiss1d monotonicity checks.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Scatter plot of a samples or pairs CSV (--data).
    Plot {
        #[command(flatten)]
        common: Common,
        /// Two columns to plot for data with more than two.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_val: Option<usize>,
    #[arg(long)]
    n_generate: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hidden layers.
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Label each of k k-means clusters separately.
    #[arg(long)]
    clusters: Option<usize>,
    /// Cosine tie width of the greedy matcher.
    #[arg(long)]
    tie_tolerance: Option<f64>,
    /// Divide centered targets by their std before labeling.
    #[arg(long)]
    rescale: bool,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Reference CSV for eval.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Plot format.
    #[arg(long, value_enum)]
    format: Option<PlotFormat>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            experiment: self.experiment,
            n_train: self.n_train,
            n_val: self.n_val,
            n_generate: self.n_generate,
            seed: self.seed,
            layers: self.layers,
            width: self.width,
            lr: self.lr,
            batch_size: self.batch_size,
            patience: self.patience,
            max_epochs: self.max_epochs,
            clusters: self.clusters,
            tie_tolerance: self.tie_tolerance,
            rescale: self.rescale,
            data: self.data.clone(),
            reference: self.reference.clone(),
            out_dir: self.out_dir.clone().or_else(|| Some(PathBuf::from("."))),
            format: self.format,
        }
    }

    fn resolve(&self, fallback: Experiment) -> Result<gtn_lab::ExperimentConfig> {
        let mut o = self.overrides();
        if self.config.is_some() && self.out_dir.is_none() {
            o.out_dir = None;
        }
        o.resolve(self.config.as_deref(), fallback)
    }
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two indices like 0,2")?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn execute(cli: Cli) -> Result<()> {
    let pool = pool_from_env()?;
    match cli.command {
        Command::Run(common) => {
            if common.experiment.is_none() && common.config.is_none() {
                return Err(LabError::Usage("run needs --experiment or --config".into()));
            }
            let cfg = common.resolve(Experiment::Custom)?;
            let manifest = cmd_run(&cfg, &pool)?;
            for (name, path) in &manifest.outputs {
                println!("{name}: {}", path.display());
            }
            for (name, m) in &manifest.metrics {
                println!("{name} = {}", m.value);
            }
        }
        Command::Label(common) => {
            let cfg = common.resolve(Experiment::Custom)?;
            let n = cmd_label(&cfg, &pool)?;
            println!("{n} pairs: {}", cfg.io.out_dir.join("pairs.csv").display());
        }
        Command::Train(common) => {
            let cfg = common.resolve(Experiment::Custom)?;
            let (_, history) = cmd_train(&cfg)?;
            println!(
                "{} epochs, best validation MSE {:e}: {}",
                history.epochs.len(),
                history.best_val_loss(),
                cfg.io.out_dir.join("model.bin").display()
            );
        }
        Command::Sample { common, model } => {
            // only the count, seed and out_dir matter here; zero draws is allowed
            let n = common.n_generate;
            let common = Common { n_generate: None, ..common };
            let cfg = common.resolve(Experiment::Swiss1d)?;
            let path = cmd_sample(&model, n.unwrap_or(cfg.n_generate), cfg.seed, &cfg.io.out_dir)?;
            println!("{}", path.display());
        }
        Command::Eval { common, model } => {
            let cfg = common.resolve(Experiment::Custom)?;
            let report = cmd_eval(&cfg, model.as_deref(), &pool)?;
            for (name, m) in report.iter() {
                println!("{name} = {}", m.value);
            }
        }
        Command::Plot { common, dims } => {
            let cfg = common.resolve(Experiment::Custom)?;
            println!("{}", cmd_plot(&cfg, dims)?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ");
            eprintln!("{}", LabError::Usage(msg.to_string()).one_line());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
