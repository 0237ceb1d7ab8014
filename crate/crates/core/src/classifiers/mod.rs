//! DAN/ADAN topic classifiers: prediction, keyword extraction, entropy-based
//! ensembling, training and model files.

mod adan;
mod dan;
mod ensemble;
mod gradcheck;
mod head;
mod keywords;
mod serialize;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adan::{AdanCache, AdanModel, ATTENTION_INIT_RANGE};
pub use dan::{DanCache, DanModel};
pub use ensemble::{ensemble_predict, LabelMap};
pub use gradcheck::{gradcheck_model, random_gradcheck_model, GradcheckOptions, GradcheckReport};
pub use head::{Mlp, MlpCache};
pub use keywords::{extract_keywords, Keyword, DEFAULT_KEYWORD_COUNT};
pub use serialize::{load_model, load_model_as, save_model, ModelFile, FORMAT_VERSION};
pub use train::{
    downsample, train, transfer_finetune, Architecture, Downsample, EpochRecord, LabeledExample,
    TrainConfig, TrainOutcome,
};

use crate::error::{Error, Result};
use crate::netcore::{argmax, normalized_entropy};
use crate::text::{tokenize, TokenizerConfig, Vocabulary};

/// Reserved label for non-topical chit-chat.
pub const PHATIC: &str = "Phatic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dan,
    Adan,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Dan => "dan",
            ModelKind::Adan => "adan",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dan" => Ok(ModelKind::Dan),
            "adan" => Ok(ModelKind::Adan),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Per-utterance classifier output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPrediction {
    pub probs: Vec<f64>,
    pub topic: String,
    pub normalized_entropy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords: Option<Vec<Keyword>>,
    pub source: String,
    /// Set when the utterance had no tokens and the prediction comes from
    /// the empty-utterance policy rather than the network.
    #[serde(default)]
    pub empty: bool,
}

impl TopicPrediction {
    pub fn from_probs(probs: Vec<f64>, labels: &[String], source: &str) -> Self {
        let topic = labels[argmax(&probs)].clone();
        let normalized_entropy = normalized_entropy(&probs);
        TopicPrediction {
            probs,
            topic,
            normalized_entropy,
            keywords: None,
            source: source.to_string(),
            empty: false,
        }
    }

    /// Uniform distribution labelled `Phatic` when the label set has it,
    /// otherwise the first label; flagged as empty either way.
    pub fn empty_utterance(labels: &[String], source: &str) -> Self {
        let k = labels.len();
        let mut p = TopicPrediction::from_probs(vec![1.0 / k as f64; k], labels, source);
        if labels.iter().any(|l| l == PHATIC) {
            p.topic = PHATIC.to_string();
        }
        p.empty = true;
        p
    }
}

/// A trained (or freshly initialized) classifier of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TopicModel {
    Dan(DanModel),
    Adan(AdanModel),
}

impl From<DanModel> for TopicModel {
    fn from(m: DanModel) -> Self {
        TopicModel::Dan(m)
    }
}

impl From<AdanModel> for TopicModel {
    fn from(m: AdanModel) -> Self {
        TopicModel::Adan(m)
    }
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            TopicModel::Dan($m) => $body,
            TopicModel::Adan($m) => $body,
        }
    };
}

impl TopicModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TopicModel::Dan(_) => ModelKind::Dan,
            TopicModel::Adan(_) => ModelKind::Adan,
        }
    }

    pub fn name(&self) -> &str {
        dispatch!(self, m => &m.name)
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        dispatch!(self, m => m.name = name.into())
    }

    pub fn labels(&self) -> &[String] {
        dispatch!(self, m => &m.labels)
    }

    pub fn vocab(&self) -> &Vocabulary {
        dispatch!(self, m => &m.vocab)
    }

    pub fn tokenizer(&self) -> &TokenizerConfig {
        dispatch!(self, m => &m.tokenizer)
    }

    pub fn embedding_dim(&self) -> usize {
        dispatch!(self, m => m.embeddings.dim())
    }

    pub fn head(&self) -> &Mlp {
        dispatch!(self, m => &m.head)
    }

    pub fn as_adan(&self) -> Option<&AdanModel> {
        match self {
            TopicModel::Adan(m) => Some(m),
            TopicModel::Dan(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        dispatch!(self, m => m.validate())
    }

    /// Class distribution for a non-empty id sequence.
    pub fn probs(&self, ids: &[usize]) -> Result<Vec<f64>> {
        Ok(match self {
            TopicModel::Dan(m) => m.forward(ids)?.head.probs,
            TopicModel::Adan(m) => m.forward(ids)?.head.probs,
        })
    }

    /// Tokenize, look up, classify. ADAN models also attach the top
    /// keywords for the predicted topic.
    pub fn predict(&self, utterance: &str) -> TopicPrediction {
        self.predict_with_keywords(utterance, DEFAULT_KEYWORD_COUNT, None)
    }

    pub fn predict_with_keywords(
        &self,
        utterance: &str,
        n_keywords: usize,
        stoplist: Option<&std::collections::HashSet<String>>,
    ) -> TopicPrediction {
        let tokens = tokenize(utterance);
        let ids = self.vocab().lookup(&tokens);
        let probs = match self.probs(&ids) {
            Ok(p) => p,
            Err(_) => return TopicPrediction::empty_utterance(self.labels(), self.name()),
        };
        let mut prediction = TopicPrediction::from_probs(probs, self.labels(), self.name());
        if let TopicModel::Adan(m) = self {
            let k = argmax(&prediction.probs);
            prediction.keywords = Some(extract_keywords(m, &tokens, &ids, k, n_keywords, stoplist));
        }
        prediction
    }

    pub(crate) fn param_blocks(&self) -> Vec<&[f64]> {
        dispatch!(self, m => m.param_blocks())
    }

    pub(crate) fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        dispatch!(self, m => m.param_blocks_mut())
    }

    /// Names of the trainable parameter blocks, in gradient order.
    pub fn block_names(&self) -> Vec<String> {
        dispatch!(self, m => m.block_names())
    }

    pub fn zero_grads(&self) -> Vec<Vec<f64>> {
        self.param_blocks().iter().map(|b| vec![0.0; b.len()]).collect()
    }

    /// Forward and backward pass for one example. Adds `scale * dL/dtheta`
    /// into `grads` and returns the unscaled loss.
    pub fn accumulate_gradients(
        &self,
        ids: &[usize],
        label: usize,
        scale: f64,
        grads: &mut [Vec<f64>],
    ) -> Result<f64> {
        dispatch!(self, m => m.accumulate_gradients(ids, label, scale, grads))
    }

    pub fn loss(&self, ids: &[usize], label: usize) -> Result<f64> {
        Ok(crate::netcore::cross_entropy(&self.probs(ids)?, label))
    }

    pub(crate) fn set_embeddings_trainable(&mut self, trainable: bool) {
        dispatch!(self, m => m.embeddings.trainable = trainable)
    }
}
