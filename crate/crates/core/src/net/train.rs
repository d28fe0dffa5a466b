use alloc::vec::Vec;

use super::adam::Adam;
use super::mlp::Mlp;
use super::mse_loss;
use crate::error::{invalid, Error, Result};
use crate::points::LabeledDataset;
use crate::rng::RngState;

/// Optimizer and stopping settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a new best validation loss before stopping.
    pub patience: usize,
    /// Share of pairs held out when no validation set is supplied.
    pub val_fraction: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 250,
            max_epochs: 200,
            patience: 20,
            val_fraction: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid("learning_rate", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(invalid("max_epochs", "must be at least 1"));
        }
        if self.patience == 0 {
            return Err(invalid("patience", "must be at least 1"));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(invalid("val_fraction", "must lie strictly between 0 and 1"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.epsilon > 0.0) {
            return Err(invalid("adam", "betas must lie in [0, 1) and epsilon must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean mini-batch loss in train mode.
    pub train_loss: f64,
    /// Inference-mode MSE on the validation pairs (NaN if the model diverged).
    pub val_loss: f64,
    /// Lowest validation loss seen so far, including this epoch.
    pub best_val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose weights were restored.
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl History {
    pub fn best_val_loss(&self) -> f64 {
        self.epochs.last().map_or(f64::INFINITY, |e| e.best_val_loss)
    }
}

/// Mini-batch Adam on MSE with `val_fraction` of the pairs held out by a
/// seeded shuffle. See [`train_with_validation`] for the loop itself.
pub fn train(model: Mlp, labeled: &LabeledDataset, tcfg: &TrainConfig, rng: &mut RngState) -> Result<(Mlp, History)> {
    tcfg.validate()?;
    let n = labeled.len();
    let perm = rng.permutation(n);
    let n_val = ((n as f64 * tcfg.val_fraction) as usize).clamp(1, n.saturating_sub(1).max(1));
    let val = labeled.select(&perm[..n_val]);
    let train_set = labeled.select(&perm[n_val..]);
    train_with_validation(model, &train_set, &val, tcfg, rng)
}

/// Trains against an explicit validation set.
///
/// Every epoch reshuffles the training pairs, steps Adam once per mini-batch,
/// then scores the validation pairs in inference mode. The weights of the
/// best validation epoch are restored at the end. Training stops after
/// `patience` epochs without improvement or at `max_epochs`. With batch
/// norm the last incomplete batch is dropped (batch statistics need two
/// rows); without it the short batch is used.
pub fn train_with_validation(
    mut model: Mlp,
    train_set: &LabeledDataset,
    val: &LabeledDataset,
    tcfg: &TrainConfig,
    rng: &mut RngState,
) -> Result<(Mlp, History)> {
    tcfg.validate()?;
    let cfg = *model.config();
    for (what, set) in [("training pairs", train_set), ("validation pairs", val)] {
        if set.sources.d() != cfg.input_dim || set.targets.d() != cfg.output_dim {
            return Err(Error::ShapeMismatch {
                what,
                left: (set.sources.d(), set.targets.d()),
                right: (cfg.input_dim, cfg.output_dim),
            });
        }
    }
    if train_set.len() < 2 * tcfg.batch_size {
        return Err(Error::TooFewSamples {
            what: "training (two mini-batches)",
            needed: 2 * tcfg.batch_size,
            found: train_set.len(),
        });
    }
    if val.is_empty() {
        return Err(Error::TooFewSamples { what: "validation", needed: 1, found: 0 });
    }

    let mut adam = Adam::new(&model.parameter_shapes(), tcfg.learning_rate, tcfg.beta1, tcfg.beta2, tcfg.epsilon);
    let drop_last = cfg.batch_norm;
    let n = train_set.len();

    let mut history = History::default();
    let mut best = model.clone();
    let mut best_loss = f64::INFINITY;
    let mut since_best = 0;

    for epoch in 0..tcfg.max_epochs {
        model.set_train_mode(true);
        let order = rng.permutation(n);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(tcfg.batch_size) {
            if drop_last && chunk.len() < tcfg.batch_size {
                break;
            }
            let batch = train_set.select(chunk);
            let cache = model.forward_cached(&batch.sources, cfg.batch_norm)?;
            let (loss, grads) = model.backward(&cache, &batch.targets)?;
            model.update_running_stats(&cache);
            let mut params = model.parameters_mut();
            adam.step(&mut params, &grads.tensors);
            loss_sum += loss;
            batches += 1;
        }

        model.set_train_mode(false);
        let val_loss = if model.check_finite() {
            mse_loss(&model.predict(&val.sources)?, &val.targets)?
        } else {
            f64::NAN
        };
        if val_loss < best_loss {
            best_loss = val_loss;
            best = model.clone();
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / batches.max(1) as f64,
            val_loss,
            best_val_loss: best_loss,
        });
        if since_best >= tcfg.patience {
            history.stopped_early = epoch + 1 < tcfg.max_epochs;
            break;
        }
    }

    best.set_train_mode(false);
    Ok((best, history))
}
