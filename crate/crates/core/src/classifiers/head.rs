use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{relu, softmax, DenseLayer};

/// Hidden ReLU layers followed by a linear output layer and softmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub hidden: Vec<DenseLayer>,
    pub output: DenseLayer,
}

/// Inputs and pre-activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct MlpCache {
    /// Input to each layer; the last entry feeds the output layer.
    inputs: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(in_dim: usize, hidden: &[usize], classes: usize, rng: &mut R) -> Self {
        let mut layers = Vec::with_capacity(hidden.len());
        let mut width = in_dim;
        for &h in hidden {
            layers.push(DenseLayer::glorot(width, h, rng));
            width = h;
        }
        Mlp {
            hidden: layers,
            output: DenseLayer::glorot(width, classes, rng),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.hidden.first().unwrap_or(&self.output).in_dim()
    }

    pub fn classes(&self) -> usize {
        self.output.out_dim()
    }

    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.hidden.iter().map(DenseLayer::out_dim).collect()
    }

    pub fn validate(&self, in_dim: usize, classes: usize) -> Result<()> {
        let mut width = in_dim;
        for (i, layer) in self.hidden.iter().chain(std::iter::once(&self.output)).enumerate() {
            if layer.in_dim() != width {
                return Err(Error::Shape(format!(
                    "layer {i} expects input width {}, previous width is {width}",
                    layer.in_dim()
                )));
            }
            if layer.bias.len() != layer.out_dim() {
                return Err(Error::Shape(format!("layer {i} bias length mismatch")));
            }
            if !layer.is_finite() {
                return Err(Error::Load(format!("layer {i} contains non-finite values")));
            }
            width = layer.out_dim();
        }
        if width != classes {
            return Err(Error::Shape(format!(
                "output layer has {width} units for {classes} labels"
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: Vec<f64>) -> MlpCache {
        let mut inputs = Vec::with_capacity(self.hidden.len() + 1);
        let mut pre_activations = Vec::with_capacity(self.hidden.len());
        let mut current = x;
        for layer in &self.hidden {
            let z = layer.forward(&current);
            let a = relu(&z);
            inputs.push(current);
            pre_activations.push(z);
            current = a;
        }
        let logits = self.output.forward(&current);
        inputs.push(current);
        MlpCache {
            inputs,
            pre_activations,
            probs: softmax(&logits),
        }
    }

    pub fn param_blocks(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.hidden.len() + 2);
        for layer in self.hidden.iter().chain(std::iter::once(&self.output)) {
            out.push(layer.weights.as_slice());
            out.push(layer.bias.as_slice());
        }
        out
    }

    pub fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.hidden.len() + 2);
        for layer in self.hidden.iter_mut().chain(std::iter::once(&mut self.output)) {
            out.push(layer.weights.as_mut_slice());
            out.push(layer.bias.as_mut_slice());
        }
        out
    }

    /// Back-propagates softmax cross-entropy for `label`, scaled by `scale`.
    /// `grads` holds `[W, b]` pairs in layer order. Returns the (scaled)
    /// gradient with respect to the head input.
    pub fn backward(&self, cache: &MlpCache, label: usize, scale: f64, grads: &mut [Vec<f64>]) -> Vec<f64> {
        let mut delta: Vec<f64> = cache
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| scale * (p - if i == label { 1.0 } else { 0.0 }))
            .collect();

        let n_hidden = self.hidden.len();
        let (gw, gb) = pair_mut(grads, n_hidden);
        delta = self.output.backward(&cache.inputs[n_hidden], &delta, gw, gb);

        for i in (0..n_hidden).rev() {
            for (d, &z) in delta.iter_mut().zip(&cache.pre_activations[i]) {
                if z <= 0.0 {
                    *d = 0.0;
                }
            }
            let (gw, gb) = pair_mut(grads, i);
            delta = self.hidden[i].backward(&cache.inputs[i], &delta, gw, gb);
        }
        delta
    }
}

fn pair_mut(grads: &mut [Vec<f64>], layer: usize) -> (&mut [f64], &mut [f64]) {
    let (w, rest) = grads[2 * layer..].split_at_mut(1);
    (w[0].as_mut_slice(), rest[0].as_mut_slice())
}
