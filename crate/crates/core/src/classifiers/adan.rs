use rand::Rng;

use super::dan::head_block_names;
use super::head::{Mlp, MlpCache};
use crate::error::{Error, Result};
use crate::netcore::{cross_entropy, softmax, Matrix};
use crate::text::{EmbeddingTable, TokenizerConfig, Vocabulary};

/// Half-width of the uniform initializer for the topic-word attention table.
pub const ATTENTION_INIT_RANGE: f64 = 0.01;

/// Attentional DAN. Keeps a `K x |V|` table of topic-word saliencies; for
/// topic `k` the saliencies of the utterance's words are softmax-normalized
/// into weights `alpha_k` and the topic representation is
/// `s_k = (1/L) sum_i alpha_{k,i} e_i`. The `K` representations are
/// flattened row-major into the MLP input.
#[derive(Debug, Clone, PartialEq)]
pub struct AdanModel {
    pub name: String,
    pub labels: Vec<String>,
    pub tokenizer: TokenizerConfig,
    pub vocab: Vocabulary,
    pub embeddings: EmbeddingTable,
    pub attention: Matrix,
    /// Applies the extra `1/L` factor on top of the normalized weights.
    pub length_scaling: bool,
    pub head: Mlp,
}

#[derive(Debug, Clone)]
pub struct AdanCache {
    /// `K x L` attention weights, one row per topic.
    pub alpha: Vec<Vec<f64>>,
    /// Flattened `K x D` representation.
    pub representation: Vec<f64>,
    pub head: MlpCache,
}

impl AdanModel {
    pub fn new<R: Rng + ?Sized>(
        name: impl Into<String>,
        labels: Vec<String>,
        vocab: Vocabulary,
        embeddings: EmbeddingTable,
        hidden: &[usize],
        rng: &mut R,
    ) -> Self {
        let k = labels.len();
        let attention = random_attention(k, vocab.len(), rng);
        let head = Mlp::new(k * embeddings.dim(), hidden, k, rng);
        AdanModel {
            name: name.into(),
            labels,
            tokenizer: TokenizerConfig::default(),
            vocab,
            embeddings,
            attention,
            length_scaling: true,
            head,
        }
    }

    pub fn topics(&self) -> usize {
        self.labels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.labels.len();
        if self.embeddings.rows() != self.vocab.len() {
            return Err(Error::Shape(format!(
                "embedding table has {} rows for a vocabulary of {}",
                self.embeddings.rows(),
                self.vocab.len()
            )));
        }
        if self.attention.shape() != (k, self.vocab.len()) {
            return Err(Error::Shape(format!(
                "attention table is {:?}, expected ({k}, {})",
                self.attention.shape(),
                self.vocab.len()
            )));
        }
        if !self.embeddings.matrix.is_finite() || !self.attention.is_finite() {
            return Err(Error::Load("model contains non-finite values".into()));
        }
        self.head.validate(k * self.embeddings.dim(), k)
    }

    fn scale(&self, len: usize) -> f64 {
        if self.length_scaling {
            1.0 / len as f64
        } else {
            1.0
        }
    }

    /// Attention weights for every topic over the utterance positions.
    pub fn attention_weights(&self, ids: &[usize]) -> Result<Vec<Vec<f64>>> {
        if ids.is_empty() {
            return Err(Error::EmptyUtterance);
        }
        Ok((0..self.topics())
            .map(|k| {
                let saliency: Vec<f64> = ids.iter().map(|&id| self.attention.get(k, id)).collect();
                softmax(&saliency)
            })
            .collect())
    }

    pub fn forward(&self, ids: &[usize]) -> Result<AdanCache> {
        let alpha = self.attention_weights(ids)?;
        let dim = self.embeddings.dim();
        let c = self.scale(ids.len());
        let mut representation = vec![0.0; self.topics() * dim];
        for (k, weights) in alpha.iter().enumerate() {
            let s_k = &mut representation[k * dim..(k + 1) * dim];
            for (&id, &a) in ids.iter().zip(weights) {
                for (acc, e) in s_k.iter_mut().zip(self.embeddings.row(id)) {
                    *acc += c * a * e;
                }
            }
        }
        let head = self.head.forward(representation.clone());
        Ok(AdanCache {
            alpha,
            representation,
            head,
        })
    }

    pub(crate) fn param_blocks(&self) -> Vec<&[f64]> {
        let mut blocks = Vec::new();
        if self.embeddings.trainable {
            blocks.push(self.embeddings.matrix.as_slice());
        }
        blocks.push(self.attention.as_slice());
        blocks.extend(self.head.param_blocks());
        blocks
    }

    pub(crate) fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut blocks = Vec::new();
        if self.embeddings.trainable {
            blocks.push(self.embeddings.matrix.as_mut_slice());
        }
        blocks.push(self.attention.as_mut_slice());
        blocks.extend(self.head.param_blocks_mut());
        blocks
    }

    pub(crate) fn block_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.embeddings.trainable {
            names.push("embeddings".to_string());
        }
        names.push("attention".to_string());
        names.extend(head_block_names(&self.head));
        names
    }

    pub(crate) fn accumulate_gradients(
        &self,
        ids: &[usize],
        label: usize,
        scale: f64,
        grads: &mut [Vec<f64>],
    ) -> Result<f64> {
        let cache = self.forward(ids)?;
        let loss = cross_entropy(&cache.head.probs, label);
        let offset = usize::from(self.embeddings.trainable);
        let (front, head_grads) = grads.split_at_mut(offset + 1);
        let d_repr = self.head.backward(&cache.head, label, scale, head_grads);

        let (emb_grads, att_grads) = front.split_at_mut(offset);
        let att = &mut att_grads[0];
        let vocab_len = self.vocab.len();
        let dim = self.embeddings.dim();
        let c = self.scale(ids.len());

        for (k, weights) in cache.alpha.iter().enumerate() {
            let ds_k = &d_repr[k * dim..(k + 1) * dim];
            // d loss / d alpha_{k,i} = c * <ds_k, e_i>
            let d_alpha: Vec<f64> = ids
                .iter()
                .map(|&id| c * dot(ds_k, self.embeddings.row(id)))
                .collect();
            let mean: f64 = weights.iter().zip(&d_alpha).map(|(a, d)| a * d).sum();
            for ((&id, &a), &d) in ids.iter().zip(weights).zip(&d_alpha) {
                att[k * vocab_len + id] += a * (d - mean);
            }
            if let Some(emb) = emb_grads.first_mut() {
                for (&id, &a) in ids.iter().zip(weights) {
                    let row = &mut emb[id * dim..(id + 1) * dim];
                    for (g, d) in row.iter_mut().zip(ds_k) {
                        *g += c * a * d;
                    }
                }
            }
        }
        Ok(loss)
    }
}

pub(crate) fn random_attention<R: Rng + ?Sized>(topics: usize, vocab: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(topics, vocab, |_, _| {
        rng.random_range(-ATTENTION_INIT_RANGE..=ATTENTION_INIT_RANGE)
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
