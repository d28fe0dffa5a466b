use alloc::vec;
use alloc::vec::Vec;

use super::source::Source;
use crate::error::{invalid, Error, Result};
use crate::math;
use crate::points::PointSet;
use crate::rng::RngState;

/// Weight of the previous running statistic in each update:
/// `running = BN_MOMENTUM * running + (1 - BN_MOMENTUM) * batch`.
pub const BN_MOMENTUM: f64 = 0.9;
pub const BN_EPSILON: f64 = 1e-5;

/// Shape and activation of the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub output_dim: usize,
    pub hidden_layers: usize,
    pub width: usize,
    /// Negative-side slope of LeakyReLU.
    pub leaky_slope: f64,
    pub batch_norm: bool,
    pub seed: u64,
}

impl MlpConfig {
    /// `hidden_layers` LeakyReLU(0.5) layers of `width` units, no batch norm.
    pub fn new(input_dim: usize, output_dim: usize, hidden_layers: usize, width: usize) -> Self {
        Self {
            input_dim,
            output_dim,
            hidden_layers,
            width,
            leaky_slope: 0.5,
            batch_norm: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.hidden_layers == 0 {
            return Err(invalid("hidden_layers", "need at least one hidden layer"));
        }
        if self.width == 0 {
            return Err(invalid("width", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.leaky_slope) {
            return Err(invalid("leaky_slope", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Number of trainable scalars.
    pub fn parameter_count(&self) -> usize {
        let mut count = 0;
        let mut fan_in = self.input_dim;
        for _ in 0..self.hidden_layers {
            count += fan_in * self.width + self.width;
            if self.batch_norm {
                count += 2 * self.width;
            }
            fan_in = self.width;
        }
        count + fan_in * self.output_dim + self.output_dim
    }
}

/// Affine layer `z = W a + b`, `W` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: Vec<f64>,
    pub(crate) fan_in: usize,
    pub(crate) fan_out: usize,
}

impl Dense {
    fn init(rng: &mut RngState, fan_in: usize, fan_out: usize, gain_slope: f64) -> Self {
        // He-uniform bound for a leaky rectifier with the given negative slope
        let bound = math::sqrt(6.0 / ((1.0 + gain_slope * gain_slope) * fan_in as f64));
        let weights = (0..fan_in * fan_out).map(|_| rng.uniform_range(-bound, bound)).collect();
        Self { weights, bias: vec![0.0; fan_out], fan_in, fan_out }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.fan_out, self.fan_in)
    }

    /// `rows x fan_in` to `rows x fan_out`.
    fn forward(&self, input: &[f64], rows: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows * self.fan_out);
        for a in input.chunks_exact(self.fan_in) {
            for (w, b) in self.weights.chunks_exact(self.fan_in).zip(&self.bias) {
                let mut z = *b;
                for (wi, ai) in w.iter().zip(a) {
                    z += wi * ai;
                }
                out.push(z);
            }
        }
        out
    }

    /// Accumulates weight/bias gradients and returns the input gradient.
    fn backward(&self, input: &[f64], grad_out: &[f64], gw: &mut [f64], gb: &mut [f64]) -> Vec<f64> {
        let mut grad_in = vec![0.0; input.len()];
        for ((a, g), gi) in input
            .chunks_exact(self.fan_in)
            .zip(grad_out.chunks_exact(self.fan_out))
            .zip(grad_in.chunks_exact_mut(self.fan_in))
        {
            for (o, &go) in g.iter().enumerate() {
                gb[o] += go;
                let w = &self.weights[o * self.fan_in..(o + 1) * self.fan_in];
                let gwo = &mut gw[o * self.fan_in..(o + 1) * self.fan_in];
                for i in 0..self.fan_in {
                    gwo[i] += go * a[i];
                    gi[i] += go * w[i];
                }
            }
        }
        grad_in
    }
}

/// Per-feature batch normalization with learned scale and shift.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub(crate) gamma: Vec<f64>,
    pub(crate) beta: Vec<f64>,
    pub(crate) running_mean: Vec<f64>,
    pub(crate) running_var: Vec<f64>,
}

impl BatchNorm {
    fn new(width: usize) -> Self {
        Self {
            gamma: vec![1.0; width],
            beta: vec![0.0; width],
            running_mean: vec![0.0; width],
            running_var: vec![1.0; width],
        }
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn running_mean(&self) -> &[f64] {
        &self.running_mean
    }

    pub fn running_var(&self) -> &[f64] {
        &self.running_var
    }
}

/// Intermediate values of one forward pass, needed by backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    rows: usize,
    /// Input to each dense layer (hidden layers, then the output layer).
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of each hidden layer.
    pre: Vec<Vec<f64>>,
    /// Normalized activations and `1/sqrt(var + eps)` per hidden layer (batch norm only).
    normalized: Vec<(Vec<f64>, Vec<f64>)>,
    /// Batch mean and biased variance per hidden layer (train-mode batch norm only).
    batch_stats: Vec<(Vec<f64>, Vec<f64>)>,
    pub output: Vec<f64>,
}

/// Gradients in parameter order (see [`Mlp::parameters`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.tensors.iter().flat_map(|t| t.iter().copied())
    }
}

/// The generator network together with its source distribution and the
/// affine transform applied to its raw output (`x = raw * scale + offset`).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub(crate) config: MlpConfig,
    pub(crate) hidden: Vec<Dense>,
    pub(crate) norms: Vec<BatchNorm>,
    pub(crate) output: Dense,
    pub(crate) train_mode: bool,
    pub(crate) source: Source,
    pub(crate) output_scale: Vec<f64>,
    pub(crate) output_offset: Vec<f64>,
}

impl Mlp {
    /// Fresh network seeded from `rng`. Weights are He-uniform for the
    /// configured leaky slope, biases zero, batch-norm scale 1 and shift 0.
    /// The output layer uses slope 1 (linear) in its bound.
    pub fn new(config: MlpConfig, rng: &mut RngState) -> Result<Self> {
        config.validate()?;
        let mut hidden = Vec::with_capacity(config.hidden_layers);
        let mut fan_in = config.input_dim;
        for _ in 0..config.hidden_layers {
            hidden.push(Dense::init(rng, fan_in, config.width, config.leaky_slope));
            fan_in = config.width;
        }
        let output = Dense::init(rng, fan_in, config.output_dim, 1.0);
        let norms = if config.batch_norm {
            (0..config.hidden_layers).map(|_| BatchNorm::new(config.width)).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            config,
            hidden,
            norms,
            output,
            train_mode: true,
            source: Source::StandardNormal,
            output_scale: vec![1.0; config.output_dim],
            output_offset: vec![0.0; config.output_dim],
        })
    }

    /// Same as [`Mlp::new`] with a generator seeded from `config.seed`.
    pub fn from_seed(config: MlpConfig) -> Result<Self> {
        Self::new(config, &mut RngState::new(config.seed))
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn train_mode(&self) -> bool {
        self.train_mode
    }

    pub fn set_train_mode(&mut self, on: bool) {
        self.train_mode = on;
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn set_source(&mut self, source: Source) {
        self.source = source;
    }

    pub fn output_offset(&self) -> &[f64] {
        &self.output_offset
    }

    pub fn output_scale(&self) -> &[f64] {
        &self.output_scale
    }

    /// Sets `x = raw * scale + offset` for [`Mlp::apply`].
    pub fn set_output_transform(&mut self, scale: Vec<f64>, offset: Vec<f64>) -> Result<()> {
        let d = self.config.output_dim;
        if scale.len() != d || offset.len() != d {
            return Err(invalid("output transform", "length must equal output_dim"));
        }
        if scale.iter().chain(&offset).any(|v| !v.is_finite()) {
            return Err(invalid("output transform", "values must be finite"));
        }
        self.output_scale = scale;
        self.output_offset = offset;
        Ok(())
    }

    pub fn hidden_layer_mut(&mut self, i: usize) -> &mut Dense {
        &mut self.hidden[i]
    }

    pub fn output_layer_mut(&mut self) -> &mut Dense {
        &mut self.output
    }

    pub fn batch_norm(&self, i: usize) -> Option<&BatchNorm> {
        self.norms.get(i)
    }

    /// Trainable tensors in declared order: for each hidden layer its
    /// weights, bias and (with batch norm) scale and shift; then the output
    /// weights and bias.
    pub fn parameters(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for (i, layer) in self.hidden.iter().enumerate() {
            out.push(&layer.weights[..]);
            out.push(&layer.bias[..]);
            if let Some(bn) = self.norms.get(i) {
                out.push(&bn.gamma[..]);
                out.push(&bn.beta[..]);
            }
        }
        out.push(&self.output.weights[..]);
        out.push(&self.output.bias[..]);
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        let mut norms = self.norms.iter_mut();
        for layer in self.hidden.iter_mut() {
            out.push(&mut layer.weights[..]);
            out.push(&mut layer.bias[..]);
            if let Some(bn) = norms.next() {
                out.push(&mut bn.gamma[..]);
                out.push(&mut bn.beta[..]);
            }
        }
        out.push(&mut self.output.weights[..]);
        out.push(&mut self.output.bias[..]);
        out
    }

    pub fn parameter_shapes(&self) -> Vec<usize> {
        self.parameters().iter().map(|p| p.len()).collect()
    }

    fn check_input(&self, batch: &PointSet) -> Result<()> {
        if batch.d() != self.config.input_dim {
            return Err(Error::ShapeMismatch {
                what: "network input",
                left: (batch.n(), batch.d()),
                right: (batch.n(), self.config.input_dim),
            });
        }
        Ok(())
    }

    /// Forward pass without side effects. `use_batch_stats` selects batch
    /// statistics (training) or running averages (inference) for batch norm.
    pub fn forward_cached(&self, batch: &PointSet, use_batch_stats: bool) -> Result<ForwardCache> {
        self.check_input(batch)?;
        let rows = batch.n();
        let slope = self.config.leaky_slope;
        let mut cache = ForwardCache {
            rows,
            inputs: Vec::with_capacity(self.hidden.len() + 1),
            pre: Vec::with_capacity(self.hidden.len()),
            normalized: Vec::new(),
            batch_stats: Vec::new(),
            output: Vec::new(),
        };
        let mut a = batch.as_slice().to_vec();
        for (l, layer) in self.hidden.iter().enumerate() {
            let z = layer.forward(&a, rows);
            let h: Vec<f64> = z.iter().map(|&v| if v > 0.0 { v } else { slope * v }).collect();
            cache.inputs.push(a);
            cache.pre.push(z);
            a = match self.norms.get(l) {
                None => h,
                Some(bn) => {
                    let w = layer.fan_out;
                    let (mean, var) = if use_batch_stats {
                        let (m, v) = column_moments(&h, w);
                        cache.batch_stats.push((m.clone(), v.clone()));
                        (m, v)
                    } else {
                        (bn.running_mean.clone(), bn.running_var.clone())
                    };
                    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / math::sqrt(v + BN_EPSILON)).collect();
                    let mut xhat = h;
                    let mut out = Vec::with_capacity(xhat.len());
                    for row in xhat.chunks_exact_mut(w) {
                        for j in 0..w {
                            row[j] = (row[j] - mean[j]) * inv_std[j];
                            out.push(bn.gamma[j] * row[j] + bn.beta[j]);
                        }
                    }
                    cache.normalized.push((xhat, inv_std));
                    out
                }
            };
        }
        cache.output = self.output.forward(&a, rows);
        cache.inputs.push(a);
        Ok(cache)
    }

    /// Forward pass honoring the current mode. In train mode batch norm
    /// uses batch statistics and updates its running averages.
    pub fn forward(&mut self, batch: &PointSet) -> Result<PointSet> {
        let cache = self.forward_cached(batch, self.train_mode && !self.norms.is_empty())?;
        if self.train_mode {
            self.update_running_stats(&cache);
        }
        Ok(PointSet::from_flat_unchecked(self.config.output_dim, cache.output))
    }

    /// Inference-mode forward pass of the raw network (running averages for batch norm).
    pub fn predict(&self, batch: &PointSet) -> Result<PointSet> {
        let cache = self.forward_cached(batch, false)?;
        Ok(PointSet::from_flat_unchecked(self.config.output_dim, cache.output))
    }

    /// The learned map: [`Mlp::predict`] followed by the output transform.
    pub fn apply(&self, batch: &PointSet) -> Result<PointSet> {
        let raw = self.predict(batch)?;
        let d = self.config.output_dim;
        let data = raw
            .rows()
            .flat_map(|r| {
                r.iter()
                    .zip(&self.output_scale)
                    .zip(&self.output_offset)
                    .map(|((v, s), o)| v * s + o)
            })
            .collect();
        PointSet::from_flat(d, data)
    }

    /// Blends this batch's statistics into the running averages. Variance
    /// uses the unbiased estimate when the batch has more than one row.
    pub fn update_running_stats(&mut self, cache: &ForwardCache) {
        let rows = cache.rows as f64;
        for (bn, (mean, var)) in self.norms.iter_mut().zip(&cache.batch_stats) {
            let correction = if cache.rows > 1 { rows / (rows - 1.0) } else { 1.0 };
            for j in 0..mean.len() {
                bn.running_mean[j] = BN_MOMENTUM * bn.running_mean[j] + (1.0 - BN_MOMENTUM) * mean[j];
                bn.running_var[j] =
                    BN_MOMENTUM * bn.running_var[j] + (1.0 - BN_MOMENTUM) * var[j] * correction;
            }
        }
    }

    /// MSE of the forward pass in the current mode and its exact gradient
    /// with respect to every parameter. Does not touch running statistics.
    pub fn loss_and_gradients(&self, batch: &PointSet, target: &PointSet) -> Result<(f64, Gradients)> {
        let cache = self.forward_cached(batch, self.train_mode && !self.norms.is_empty())?;
        self.backward(&cache, target)
    }

    /// Backpropagates MSE through a cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, target: &PointSet) -> Result<(f64, Gradients)> {
        let rows = cache.rows;
        if target.n() != rows || target.d() != self.config.output_dim {
            return Err(Error::ShapeMismatch {
                what: "training target",
                left: (target.n(), target.d()),
                right: (rows, self.config.output_dim),
            });
        }
        if rows == 0 {
            return Err(Error::TooFewSamples { what: "backward", needed: 1, found: 0 });
        }
        let scale = 1.0 / rows as f64;
        let mut loss = 0.0;
        let mut grad: Vec<f64> = cache
            .output
            .iter()
            .zip(target.as_slice())
            .map(|(p, t)| {
                let r = p - t;
                loss += r * r;
                2.0 * r * scale
            })
            .collect();
        loss *= scale;

        let mut tensors: Vec<Vec<f64>> = self.parameter_shapes().iter().map(|&n| vec![0.0; n]).collect();
        let mut slot = tensors.len();

        slot -= 2;
        let (gw, gb) = two_mut(&mut tensors, slot);
        grad = self.output.backward(&cache.inputs[self.hidden.len()], &grad, gw, gb);

        let slope = self.config.leaky_slope;
        for l in (0..self.hidden.len()).rev() {
            let w = self.hidden[l].fan_out;
            if let Some(bn) = self.norms.get(l) {
                slot -= 2;
                let (xhat, inv_std) = &cache.normalized[l];
                let (ggamma, gbeta) = two_mut(&mut tensors, slot);
                let mut dxhat = vec![0.0; grad.len()];
                for ((g, xh), dx) in grad.chunks_exact(w).zip(xhat.chunks_exact(w)).zip(dxhat.chunks_exact_mut(w)) {
                    for j in 0..w {
                        ggamma[j] += g[j] * xh[j];
                        gbeta[j] += g[j];
                        dx[j] = g[j] * bn.gamma[j];
                    }
                }
                if self.train_mode {
                    let n = rows as f64;
                    let mut sum_dx = vec![0.0; w];
                    let mut sum_dx_xh = vec![0.0; w];
                    for (dx, xh) in dxhat.chunks_exact(w).zip(xhat.chunks_exact(w)) {
                        for j in 0..w {
                            sum_dx[j] += dx[j];
                            sum_dx_xh[j] += dx[j] * xh[j];
                        }
                    }
                    for (g, (dx, xh)) in grad.chunks_exact_mut(w).zip(dxhat.chunks_exact(w).zip(xhat.chunks_exact(w))) {
                        for j in 0..w {
                            g[j] = inv_std[j] / n * (n * dx[j] - sum_dx[j] - xh[j] * sum_dx_xh[j]);
                        }
                    }
                } else {
                    for (g, dx) in grad.chunks_exact_mut(w).zip(dxhat.chunks_exact(w)) {
                        for j in 0..w {
                            g[j] = dx[j] * inv_std[j];
                        }
                    }
                }
            }
            for (g, z) in grad.iter_mut().zip(&cache.pre[l]) {
                if *z <= 0.0 {
                    *g *= slope;
                }
            }
            slot -= 2;
            let (gw, gb) = two_mut(&mut tensors, slot);
            grad = self.hidden[l].backward(&cache.inputs[l], &grad, gw, gb);
        }
        debug_assert_eq!(slot, 0);
        Ok((loss, Gradients { tensors }))
    }

    /// Fails if any parameter or buffer is non-finite.
    pub(crate) fn check_finite(&self) -> bool {
        self.parameters().iter().all(|p| p.iter().all(|v| v.is_finite()))
            && self
                .norms
                .iter()
                .all(|bn| bn.running_mean.iter().chain(&bn.running_var).all(|v| v.is_finite()))
    }
}

fn two_mut(tensors: &mut [Vec<f64>], i: usize) -> (&mut [f64], &mut [f64]) {
    let (a, b) = tensors.split_at_mut(i + 1);
    (&mut a[i], &mut b[0])
}

/// Column means and biased variances of a `rows x w` buffer.
fn column_moments(data: &[f64], w: usize) -> (Vec<f64>, Vec<f64>) {
    let rows = (data.len() / w).max(1) as f64;
    let mut mean = vec![0.0; w];
    for row in data.chunks_exact(w) {
        for j in 0..w {
            mean[j] += row[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= rows);
    let mut var = vec![0.0; w];
    for row in data.chunks_exact(w) {
        for j in 0..w {
            let d = row[j] - mean[j];
            var[j] += d * d;
        }
    }
    var.iter_mut().for_each(|v| *v /= rows);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_standard_normal;

    #[test]
    fn parameter_count_of_swiss_roll_net() {
        let cfg = MlpConfig::new(1, 1, 4, 6);
        assert_eq!(cfg.parameter_count(), 145);
        let model = Mlp::from_seed(cfg).unwrap();
        assert_eq!(model.parameters().iter().map(|p| p.len()).sum::<usize>(), 145);
    }

    #[test]
    fn same_seed_same_weights() {
        let cfg = MlpConfig { seed: 9, ..MlpConfig::new(2, 2, 3, 5) };
        assert_eq!(Mlp::from_seed(cfg).unwrap(), Mlp::from_seed(cfg).unwrap());
    }

    #[test]
    fn fresh_model_gives_finite_output() {
        let model = Mlp::from_seed(MlpConfig::new(3, 2, 2, 4)).unwrap();
        let out = model.predict(&PointSet::zeros(1, 3).unwrap()).unwrap();
        assert!(out.as_slice().iter().all(|v| v.is_finite()));
        assert!(Mlp::from_seed(MlpConfig::new(1, 1, 0, 4)).is_err());
        assert!(Mlp::from_seed(MlpConfig { leaky_slope: 1.5, ..MlpConfig::new(1, 1, 1, 4) }).is_err());
    }

    #[test]
    fn identity_network() {
        let cfg = MlpConfig { leaky_slope: 1.0, ..MlpConfig::new(2, 2, 1, 2) };
        let mut model = Mlp::from_seed(cfg).unwrap();
        model.hidden_layer_mut(0).weights_mut().copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        model.output_layer_mut().weights_mut().copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        let x = PointSet::from_rows(&[[1.5, -2.0], [-0.25, 3.0]]).unwrap();
        assert_eq!(model.predict(&x).unwrap(), x);
    }

    #[test]
    fn leaky_unit_halves_negative_input() {
        let mut model = Mlp::from_seed(MlpConfig::new(1, 1, 1, 1)).unwrap();
        model.hidden_layer_mut(0).weights_mut()[0] = 1.0;
        model.output_layer_mut().weights_mut()[0] = 1.0;
        let out = model.predict(&PointSet::from_column(&[-3.0]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[-1.5]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut model = Mlp::from_seed(MlpConfig::new(2, 1, 1, 3)).unwrap();
        assert!(model.forward(&PointSet::zeros(2, 3).unwrap()).is_err());
    }

    #[test]
    fn inference_is_deterministic() {
        let cfg = MlpConfig { batch_norm: true, ..MlpConfig::new(2, 2, 2, 4) };
        let mut model = Mlp::from_seed(cfg).unwrap();
        let x = sample_standard_normal(&mut RngState::new(1), 16, 2);
        model.forward(&x).unwrap();
        model.set_train_mode(false);
        let a = model.forward(&x).unwrap();
        let b = model.forward(&x).unwrap();
        assert_eq!(a, b);
        // inference mode output for a row does not depend on the rest of the batch
        let single = model.predict(&x.select(&[3])).unwrap();
        assert_eq!(single.row(0), a.row(3));
    }

    #[test]
    fn train_mode_updates_running_stats() {
        let cfg = MlpConfig { batch_norm: true, ..MlpConfig::new(1, 1, 1, 3) };
        let mut model = Mlp::from_seed(cfg).unwrap();
        let before = model.batch_norm(0).unwrap().running_mean().to_vec();
        model.forward(&sample_standard_normal(&mut RngState::new(2), 8, 1)).unwrap();
        assert_ne!(model.batch_norm(0).unwrap().running_mean(), &before[..]);
    }

    #[test]
    fn zero_residual_zero_gradient() {
        let model = Mlp::from_seed(MlpConfig::new(2, 2, 2, 4)).unwrap();
        let x = sample_standard_normal(&mut RngState::new(3), 5, 2);
        let target = model.predict(&x).unwrap();
        let (loss, grads) = model.loss_and_gradients(&x, &target).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.iter().all(|g| g == 0.0));
    }

    #[test]
    fn gradient_linear_in_residual_for_linear_net() {
        let cfg = MlpConfig { leaky_slope: 1.0, ..MlpConfig::new(2, 2, 2, 3) };
        let model = Mlp::from_seed(cfg).unwrap();
        let x = sample_standard_normal(&mut RngState::new(4), 6, 2);
        let pred = model.predict(&x).unwrap();
        let t1 = sample_standard_normal(&mut RngState::new(5), 6, 2);
        // residual r = pred - t1; doubling it means target pred - 2r
        let t2 = PointSet::from_flat(
            2,
            pred.as_slice().iter().zip(t1.as_slice()).map(|(p, t)| p - 2.0 * (p - t)).collect(),
        )
        .unwrap();
        let (_, g1) = model.loss_and_gradients(&x, &t1).unwrap();
        let (_, g2) = model.loss_and_gradients(&x, &t2).unwrap();
        for (a, b) in g1.iter().zip(g2.iter()) {
            assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}
