//! AdamW with decoupled weight decay, a cyclic cosine learning-rate
//! schedule, and global-norm gradient clipping.

use super::matrix::Matrix;
use serde::{Deserialize, Serialize};

/// AdamW hyperparameters. Decay is decoupled from the moment update.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig { beta1: 0.9, beta2: 0.999, epsilon: 1e-8, weight_decay: 1e-9 }
    }
}

/// First and second moment estimates, one pair per parameter tensor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdamWState {
    pub step: u64,
    pub m: Vec<Matrix>,
    pub v: Vec<Matrix>,
}

impl AdamWState {
    pub fn new(shapes: &[(usize, usize)]) -> Self {
        AdamWState {
            step: 0,
            m: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
        }
    }
}

/// One AdamW update over a flat list of parameter tensors:
/// bias-corrected moments, then `θ ← θ − lr·m̂/(√v̂+ε) − lr·λ·θ`.
pub fn adamw_step(
    params: &mut [&mut Matrix],
    grads: &[&Matrix],
    state: &mut AdamWState,
    lr: f64,
    config: &AdamWConfig,
) {
    assert_eq!(params.len(), grads.len(), "one gradient per parameter tensor");
    assert_eq!(params.len(), state.m.len(), "state sized for these parameters");
    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - config.beta1.powi(t);
    let bias2 = 1.0 - config.beta2.powi(t);
    for ((param, grad), (m, v)) in
        params.iter_mut().zip(grads).zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        assert_eq!(param.shape(), grad.shape(), "gradient shape");
        for k in 0..param.data().len() {
            let g = grad.data()[k];
            let mk = config.beta1 * m.data()[k] + (1.0 - config.beta1) * g;
            let vk = config.beta2 * v.data()[k] + (1.0 - config.beta2) * g * g;
            m.data_mut()[k] = mk;
            v.data_mut()[k] = vk;
            let m_hat = mk / bias1;
            let v_hat = vk / bias2;
            let theta = param.data()[k];
            param.data_mut()[k] =
                theta - lr * (m_hat / (v_hat.sqrt() + config.epsilon)) - lr * config.weight_decay * theta;
        }
    }
}

/// Cyclic cosine schedule: starts at `lr_max`, decays to `lr_min` along a
/// half cosine, restarts every `cycle_len` steps.
pub fn cosine_cyclic_lr(step: u64, lr_max: f64, lr_min: f64, cycle_len: u64) -> f64 {
    assert!(cycle_len >= 1, "cycle length must be positive");
    let phase = (step % cycle_len) as f64 / cycle_len as f64;
    lr_min + 0.5 * (lr_max - lr_min) * (1.0 + (std::f64::consts::PI * phase).cos())
}

/// Scales all gradients by `max_norm / ‖g‖₂` when the joint norm exceeds
/// `max_norm`. Returns the pre-clip norm.
pub fn clip_global_norm(grads: &mut [Matrix], max_norm: f64) -> f64 {
    let sq_sum: f64 = grads.iter().flat_map(|g| g.data()).map(|&x| x * x).sum();
    let norm = sq_sum.sqrt();
    if norm > max_norm && norm > 0.0 {
        for g in grads.iter_mut() {
            for x in g.data_mut() {
                // Multiply before dividing: (x * max) / norm keeps exactly
                // representable results exact, unlike x * (max / norm).
                *x = (*x * max_norm) / norm;
            }
        }
    }
    norm
}
