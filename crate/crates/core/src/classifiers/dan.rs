use rand::Rng;

use super::head::{Mlp, MlpCache};
use crate::error::{Error, Result};
use crate::netcore::cross_entropy;
use crate::text::{EmbeddingTable, TokenizerConfig, Vocabulary};

/// Deep averaging network: mean of the utterance's word embeddings fed
/// through a ReLU MLP and softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct DanModel {
    pub name: String,
    pub labels: Vec<String>,
    pub tokenizer: TokenizerConfig,
    pub vocab: Vocabulary,
    pub embeddings: EmbeddingTable,
    pub head: Mlp,
}

#[derive(Debug, Clone)]
pub struct DanCache {
    pub representation: Vec<f64>,
    pub head: MlpCache,
}

impl DanModel {
    pub fn new<R: Rng + ?Sized>(
        name: impl Into<String>,
        labels: Vec<String>,
        vocab: Vocabulary,
        embeddings: EmbeddingTable,
        hidden: &[usize],
        rng: &mut R,
    ) -> Self {
        let head = Mlp::new(embeddings.dim(), hidden, labels.len(), rng);
        DanModel {
            name: name.into(),
            labels,
            tokenizer: TokenizerConfig::default(),
            vocab,
            embeddings,
            head,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.embeddings.rows() != self.vocab.len() {
            return Err(Error::Shape(format!(
                "embedding table has {} rows for a vocabulary of {}",
                self.embeddings.rows(),
                self.vocab.len()
            )));
        }
        if !self.embeddings.matrix.is_finite() {
            return Err(Error::Load("embedding table contains non-finite values".into()));
        }
        self.head.validate(self.embeddings.dim(), self.labels.len())
    }

    /// `s = (1/L) sum_i e_i`
    pub fn represent(&self, ids: &[usize]) -> Result<Vec<f64>> {
        if ids.is_empty() {
            return Err(Error::EmptyUtterance);
        }
        let mut s = vec![0.0; self.embeddings.dim()];
        for &id in ids {
            for (acc, v) in s.iter_mut().zip(self.embeddings.row(id)) {
                *acc += v;
            }
        }
        let inv = 1.0 / ids.len() as f64;
        s.iter_mut().for_each(|v| *v *= inv);
        Ok(s)
    }

    pub fn forward(&self, ids: &[usize]) -> Result<DanCache> {
        let representation = self.represent(ids)?;
        let head = self.head.forward(representation.clone());
        Ok(DanCache {
            representation,
            head,
        })
    }

    pub(crate) fn param_blocks(&self) -> Vec<&[f64]> {
        let mut blocks = Vec::new();
        if self.embeddings.trainable {
            blocks.push(self.embeddings.matrix.as_slice());
        }
        blocks.extend(self.head.param_blocks());
        blocks
    }

    pub(crate) fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut blocks = Vec::new();
        if self.embeddings.trainable {
            blocks.push(self.embeddings.matrix.as_mut_slice());
        }
        blocks.extend(self.head.param_blocks_mut());
        blocks
    }

    pub(crate) fn block_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.embeddings.trainable {
            names.push("embeddings".to_string());
        }
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
        let (emb_grads, head_grads) = grads.split_at_mut(offset);
        let d_repr = self.head.backward(&cache.head, label, scale, head_grads);

        if let Some(emb) = emb_grads.first_mut() {
            let dim = self.embeddings.dim();
            let inv = 1.0 / ids.len() as f64;
            for &id in ids {
                let row = &mut emb[id * dim..(id + 1) * dim];
                for (g, d) in row.iter_mut().zip(&d_repr) {
                    *g += inv * d;
                }
            }
        }
        Ok(loss)
    }
}

pub(crate) fn head_block_names(head: &Mlp) -> Vec<String> {
    let mut names = Vec::new();
    for i in 0..head.hidden.len() {
        names.push(format!("hidden{i}.weights"));
        names.push(format!("hidden{i}.bias"));
    }
    names.push("output.weights".to_string());
    names.push("output.bias".to_string());
    names
}
