//! The generator network: a dense feedforward MLP with LeakyReLU hidden
//! layers, optional batch normalization, and a linear output layer, trained
//! with hand-written backpropagation and Adam on mean squared error.

mod adam;
mod codec;
mod mlp;
mod source;
mod train;

pub use adam::Adam;
pub use codec::{decode_model, encode_model, FORMAT_VERSION, MAGIC};
pub use mlp::{BatchNorm, Dense, ForwardCache, Gradients, Mlp, MlpConfig, BN_EPSILON, BN_MOMENTUM};
pub use source::Source;
pub use train::{train, train_with_validation, EpochRecord, History, TrainConfig};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::RngState;

/// `(1/n) Σ |pred_i - target_i|^2`.
pub fn mse_loss(pred: &PointSet, target: &PointSet) -> Result<f64> {
    if pred.n() != target.n() || pred.d() != target.d() {
        return Err(Error::ShapeMismatch {
            what: "mse",
            left: (pred.n(), pred.d()),
            right: (target.n(), target.d()),
        });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(total / pred.n() as f64)
}

/// Draws `n` points from the model's source distribution and maps them
/// through the network and its output transform.
pub fn generate(model: &Mlp, rng: &mut RngState, n: usize) -> Result<PointSet> {
    let sources = model.source().sample(rng, n, model.config().input_dim);
    model.apply(&sources)
}

/// Like [`generate`], also returning the source points.
pub fn generate_with_sources(model: &Mlp, rng: &mut RngState, n: usize) -> Result<(PointSet, PointSet)> {
    let sources = model.source().sample(rng, n, model.config().input_dim);
    let out = model.apply(&sources)?;
    Ok((sources, out))
}
