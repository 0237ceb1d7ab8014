use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{axpy, Matrix};

/// Fully connected layer computing `W x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Self {
        assert_eq!(weights.rows(), bias.len(), "bias length must equal out_dim");
        DenseLayer { weights, bias }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = Matrix::from_fn(out_dim, in_dim, |_, _| rng.random_range(-limit..=limit));
        DenseLayer {
            weights,
            bias: vec![0.0; out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.in_dim(), "dense layer input dimension mismatch");
        let mut y = self.weights.matvec(x);
        for (v, b) in y.iter_mut().zip(&self.bias) {
            *v += b;
        }
        y
    }

    /// Accumulates parameter gradients for output gradient `dy` at input `x`
    /// and returns the gradient with respect to `x`.
    pub fn backward(&self, x: &[f64], dy: &[f64], grad_w: &mut [f64], grad_b: &mut [f64]) -> Vec<f64> {
        let in_dim = self.in_dim();
        for (r, &g) in dy.iter().enumerate() {
            grad_b[r] += g;
            if g != 0.0 {
                axpy(&mut grad_w[r * in_dim..(r + 1) * in_dim], g, x);
            }
        }
        self.weights.matvec_t(dy)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.is_finite() && self.bias.iter().all(|v| v.is_finite())
    }
}
