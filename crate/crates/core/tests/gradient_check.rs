//! Analytic gradients against central finite differences.

use gtn_core::net::{Mlp, MlpConfig};
use gtn_core::rng::{sample_standard_normal, RngState};
use gtn_core::PointSet;

const STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;
/// Denominator floor so parameters with a vanishing gradient are judged absolutely.
const FLOOR: f64 = 1e-6;

fn loss(model: &Mlp, x: &PointSet, t: &PointSet) -> f64 {
    model.loss_and_gradients(x, t).unwrap().0
}

/// Largest relative error over every parameter.
fn worst_relative_error(model: &Mlp, x: &PointSet, t: &PointSet) -> f64 {
    let (_, analytic) = model.loss_and_gradients(x, t).unwrap();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (ti, tensor) in analytic.tensors.iter().enumerate() {
        for (i, &g) in tensor.iter().enumerate() {
            let orig = probe.parameters()[ti][i];
            probe.parameters_mut()[ti][i] = orig + STEP;
            let up = loss(&probe, x, t);
            probe.parameters_mut()[ti][i] = orig - STEP;
            let down = loss(&probe, x, t);
            probe.parameters_mut()[ti][i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(FLOOR);
            worst = worst.max(rel);
        }
    }
    worst
}

fn random_case(seed: u64, batch_norm: bool) -> (Mlp, PointSet, PointSet) {
    let mut rng = RngState::new(seed);
    let d_in = 1 + rng.below(3);
    let d_out = 1 + rng.below(3);
    let cfg = MlpConfig {
        batch_norm,
        seed,
        ..MlpConfig::new(d_in, d_out, 1 + rng.below(3), 1 + rng.below(8))
    };
    let mut model = Mlp::new(cfg, &mut rng).unwrap();
    // move batch-norm scale/shift off their trivial initial values
    if batch_norm {
        for p in model.parameters_mut() {
            for v in p.iter_mut() {
                *v += 0.1 * rng.normal();
            }
        }
    }
    let x = sample_standard_normal(&mut rng, 8, d_in);
    let t = sample_standard_normal(&mut rng, 8, d_out);
    (model, x, t)
}

#[test]
fn small_two_layer_model() {
    let cfg = MlpConfig::new(2, 2, 2, 4);
    let model = Mlp::from_seed(cfg).unwrap();
    let x = sample_standard_normal(&mut RngState::new(1), 8, 2);
    let t = sample_standard_normal(&mut RngState::new(2), 8, 2);
    let worst = worst_relative_error(&model, &x, &t);
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}

#[test]
fn random_configurations_with_and_without_batch_norm() {
    for seed in 0..25 {
        for bn in [false, true] {
            let (model, x, t) = random_case(seed, bn);
            let worst = worst_relative_error(&model, &x, &t);
            assert!(worst < TOLERANCE, "seed {seed} bn {bn}: worst relative error {worst}");
        }
    }
}

#[test]
fn inference_mode_batch_norm_gradients() {
    let (mut model, x, t) = random_case(99, true);
    model.forward(&x).unwrap();
    model.set_train_mode(false);
    let worst = worst_relative_error(&model, &x, &t);
    assert!(worst < TOLERANCE, "worst relative error {worst}");
}
