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
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment estimates for a list of parameter blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(config: AdamConfig, block_sizes: &[usize]) -> Self {
        AdamState {
            config,
            step: 0,
            first: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            second: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// One bias-corrected Adam update of `params` along `grads`.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[Vec<f64>]) {
        assert_eq!(params.len(), self.first.len(), "adam: block count mismatch");
        assert_eq!(grads.len(), self.first.len(), "adam: gradient block count mismatch");
        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step as i32;
        let correction1 = 1.0 - beta1.powi(t);
        let correction2 = 1.0 - beta2.powi(t);

        for (b, block) in params.iter_mut().enumerate() {
            let g = &grads[b];
            let m = &mut self.first[b];
            let v = &mut self.second[b];
            assert_eq!(block.len(), m.len(), "adam: parameter shape mismatch");
            assert_eq!(g.len(), m.len(), "adam: gradient shape mismatch");
            for i in 0..block.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = m[i] / correction1;
                let v_hat = v[i] / correction2;
                block[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![1.0, -2.0, 3.0];
        let mut s = AdamState::new(AdamConfig::default(), &[3]);
        s.step(&mut [p.as_mut_slice()], &[vec![0.0; 3]]);
        assert_eq!(p, vec![1.0, -2.0, 3.0]);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn first_step_closed_form() {
        let g = vec![0.5, -2.0, 1e-3];
        let mut p = vec![0.0; 3];
        let cfg = AdamConfig::default();
        let mut s = AdamState::new(cfg, &[3]);
        s.step(&mut [p.as_mut_slice()], std::slice::from_ref(&g));
        for (pi, gi) in p.iter().zip(&g) {
            let expected = -cfg.lr * gi / (gi.abs() + cfg.epsilon);
            assert!((pi - expected).abs() < 1e-15, "{pi} vs {expected}");
            assert_eq!(pi.signum(), -gi.signum());
        }
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut p = vec![0.3, 0.7];
            let mut s = AdamState::new(AdamConfig::default(), &[2]);
            for _ in 0..5 {
                s.step(&mut [p.as_mut_slice()], &[vec![0.1, -0.4]]);
            }
            (p, s)
        };
        assert_eq!(run(), run());
    }
}
