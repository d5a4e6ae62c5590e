//! Adam optimizer with bias correction.

use super::array::Array;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig { lr, ..AdamConfig::default() }
    }
}

/// Moment buffers for one parameter list; `step` advances the shared counter.
pub struct AdamState {
    pub config: AdamConfig,
    m: Vec<Array>,
    v: Vec<Array>,
    t: u64,
}

impl AdamState {
    pub fn new(config: AdamConfig, shapes: &[(usize, usize)]) -> Self {
        AdamState {
            config,
            m: shapes.iter().map(|&(r, c)| Array::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Array::zeros(r, c)).collect(),
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update over aligned (param, grad) pairs. A `None` gradient leaves
    /// that parameter and its moments untouched.
    pub fn step(&mut self, params: &mut [Array], grads: &[Option<Array>]) {
        assert_eq!(params.len(), self.m.len(), "parameter count changed under the optimizer");
        assert_eq!(params.len(), grads.len());
        self.t += 1;
        let t = self.t as i32;
        let AdamConfig { lr, beta1, beta2, epsilon } = self.config;
        let bias1 = 1.0 - beta1.powi(t);
        let bias2 = 1.0 - beta2.powi(t);
        for i in 0..params.len() {
            let Some(grad) = &grads[i] else { continue };
            debug_assert!(params[i].same_shape(grad));
            let m = self.m[i].data_mut();
            let v = self.v[i].data_mut();
            let p = params[i].data_mut();
            for j in 0..p.len() {
                let g = grad.data()[j];
                m[j] = beta1 * m[j] + (1.0 - beta1) * g;
                v[j] = beta2 * v[j] + (1.0 - beta2) * g * g;
                let m_hat = m[j] / bias1;
                let v_hat = v[j] / bias2;
                p[j] -= lr * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
    }
}

/// One Adam update on standalone arrays (state threaded explicitly).
pub fn adam_step(params: &mut [Array], grads: &[Option<Array>], state: &mut AdamState) {
    state.step(params, grads);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        // bias-corrected first step: update = lr * g / (|g| + eps') ≈ lr
        let mut params = vec![Array::scalar(1.0)];
        let grads = vec![Some(Array::scalar(2.0))];
        let mut state = AdamState::new(AdamConfig::default(), &[(1, 1)]);
        state.step(&mut params, &grads);
        let w = params[0].scalar_value();
        assert!((w - (1.0 - 1e-3)).abs() < 1e-9, "w = {w}");
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn zero_gradient_leaves_param_unchanged() {
        let mut params = vec![Array::scalar(5.0)];
        let grads = vec![Some(Array::scalar(0.0))];
        let mut state = AdamState::new(AdamConfig::default(), &[(1, 1)]);
        state.step(&mut params, &grads);
        assert_eq!(params[0].scalar_value(), 5.0);
    }

    #[test]
    fn missing_gradient_skips_param_and_moments() {
        let mut params = vec![Array::scalar(5.0), Array::scalar(1.0)];
        let grads = vec![None, Some(Array::scalar(1.0))];
        let mut state = AdamState::new(AdamConfig::default(), &[(1, 1), (1, 1)]);
        state.step(&mut params, &grads);
        assert_eq!(params[0].scalar_value(), 5.0);
        assert!(params[1].scalar_value() < 1.0);
    }

    #[test]
    fn parameters_update_independently() {
        // two singleton states vs one two-param state: identical trajectories
        let steps = 5;
        let grad_for = |i: usize, step: usize| Array::scalar((i + 1) as f64 * 0.3 + step as f64 * 0.1);

        let mut joint = vec![Array::scalar(1.0), Array::scalar(-2.0)];
        let mut joint_state = AdamState::new(AdamConfig::default(), &[(1, 1), (1, 1)]);
        for s in 0..steps {
            let grads = vec![Some(grad_for(0, s)), Some(grad_for(1, s))];
            joint_state.step(&mut joint, &grads);
        }

        let mut solo = vec![Array::scalar(1.0), Array::scalar(-2.0)];
        for (i, param) in solo.iter_mut().enumerate() {
            let mut state = AdamState::new(AdamConfig::default(), &[(1, 1)]);
            let mut slice = vec![param.clone()];
            for s in 0..steps {
                state.step(&mut slice, &[Some(grad_for(i, s))]);
            }
            *param = slice.pop().unwrap();
        }

        assert_eq!(joint[0], solo[0]);
        assert_eq!(joint[1], solo[1]);
    }

    #[test]
    fn descends_a_quadratic() {
        // minimize (w-3)^2; gradient 2(w-3)
        let mut params = vec![Array::scalar(0.0)];
        let mut state = AdamState::new(AdamConfig::with_lr(0.1), &[(1, 1)]);
        for _ in 0..500 {
            let w = params[0].scalar_value();
            state.step(&mut params, &[Some(Array::scalar(2.0 * (w - 3.0)))]);
        }
        assert!((params[0].scalar_value() - 3.0).abs() < 0.05);
    }

    #[test]
    fn free_function_equivalent() {
        let mut a = vec![Array::scalar(1.0)];
        let mut b = vec![Array::scalar(1.0)];
        let mut sa = AdamState::new(AdamConfig::default(), &[(1, 1)]);
        let mut sb = AdamState::new(AdamConfig::default(), &[(1, 1)]);
        sa.step(&mut a, &[Some(Array::scalar(0.7))]);
        adam_step(&mut b, &[Some(Array::scalar(0.7))], &mut sb);
        assert_eq!(a[0], b[0]);
    }
}
