use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adan::random_attention;
use super::{AdanModel, DanModel, Mlp, ModelKind, TopicModel, PHATIC};
use crate::error::{Error, Result};
use crate::netcore::{argmax, AdamConfig, AdamState};
use crate::text::{load_embeddings, tokenize, EmbeddingTable, Vocabulary};

/// One row of a labeled-data JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub topic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Downsample {
    pub label: String,
    pub keep: f64,
}

impl std::str::FromStr for Downsample {
    type Err = Error;

    /// Parses `LABEL:P`.
    fn from_str(s: &str) -> Result<Self> {
        let (label, p) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::Config(format!("expected LABEL:P, got {s:?}")))?;
        let keep: f64 = p
            .parse()
            .map_err(|_| Error::Config(format!("bad keep probability in {s:?}")))?;
        if label.is_empty() || !(0.0..=1.0).contains(&keep) {
            return Err(Error::Config(format!("bad downsample spec {s:?}")));
        }
        Ok(Downsample {
            label: label.to_string(),
            keep,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    pub word_dropout: f64,
    pub fine_tune_embeddings: bool,
    pub downsample: Option<Downsample>,
    /// Epochs without a dev-accuracy improvement before stopping; 0 disables.
    pub patience: usize,
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 64,
            lr: 1e-3,
            seed: 0,
            word_dropout: 0.0,
            fine_tune_embeddings: true,
            downsample: None,
            patience: 5,
            min_count: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.min_count == 0 {
            return Err(Error::Config("batch_size and min_count must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.word_dropout) {
            return Err(Error::Config("word_dropout must lie in [0, 1]".into()));
        }
        if let Some(d) = &self.downsample {
            if !(0.0..=1.0).contains(&d.keep) {
                return Err(Error::Config("downsample probability must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Network shape. Defaults: 300-d embeddings, one 500-unit hidden layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Architecture {
    pub embedding_dim: usize,
    pub hidden: Vec<usize>,
    /// ADAN only: keep the `1/L` factor in the topic representations.
    pub length_scaling: bool,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            embedding_dim: 300,
            hidden: vec![500],
            length_scaling: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot with the best dev accuracy.
    pub model: TopicModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_dev_accuracy: f64,
    /// Training rows dropped because they tokenized to nothing.
    pub skipped_empty: usize,
}

/// Bernoulli filter over rows labelled `label`; every other row is kept.
pub fn downsample(examples: &[LabeledExample], label: &str, keep: f64, seed: u64) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d0e5);
    examples
        .iter()
        .filter(|ex| ex.topic != label || rng.random::<f64>() < keep)
        .cloned()
        .collect()
}

struct Encoded {
    ids: Vec<usize>,
    label: usize,
}

fn label_set(train: &[LabeledExample]) -> Vec<String> {
    train
        .iter()
        .map(|e| e.topic.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn encode(examples: &[LabeledExample], vocab: &Vocabulary, labels: &[String]) -> Result<(Vec<Encoded>, usize)> {
    let mut out = Vec::with_capacity(examples.len());
    let mut skipped = 0;
    for ex in examples {
        let label = labels
            .iter()
            .position(|l| *l == ex.topic)
            .ok_or_else(|| Error::Data(format!("label {:?} is not in the label set", ex.topic)))?;
        let ids = vocab.lookup(&tokenize(&ex.text));
        if ids.is_empty() {
            skipped += 1;
            continue;
        }
        out.push(Encoded { ids, label });
    }
    Ok((out, skipped))
}

fn check_inputs(train: &[LabeledExample], dev: &[LabeledExample], labels: &[String]) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    if dev.is_empty() {
        return Err(Error::Data("dev set is empty".into()));
    }
    if labels.len() < 2 {
        return Err(Error::Data("need at least two distinct labels".into()));
    }
    Ok(())
}

/// Trains a fresh DAN or ADAN. Vocabulary comes from the training texts;
/// embeddings from `embeddings` (GloVe text format) when given, otherwise
/// seeded uniform initialization.
pub fn train(
    kind: ModelKind,
    train_data: &[LabeledExample],
    dev: &[LabeledExample],
    arch: &Architecture,
    config: &TrainConfig,
    embeddings: Option<&Path>,
) -> Result<TrainOutcome> {
    config.validate()?;
    let train_data = match &config.downsample {
        Some(d) => downsample(train_data, &d.label, d.keep, config.seed),
        None => train_data.to_vec(),
    };
    let labels = label_set(&train_data);
    check_inputs(&train_data, dev, &labels)?;
    if arch.embedding_dim == 0 {
        return Err(Error::Config("embedding dimension must be positive".into()));
    }

    let tokenized: Vec<Vec<String>> = train_data.iter().map(|e| tokenize(&e.text)).collect();
    let vocab = Vocabulary::build(&tokenized, config.min_count);
    let mut table = match embeddings {
        Some(path) => load_embeddings(path, &vocab, arch.embedding_dim, config.seed)?,
        None => EmbeddingTable::random(vocab.len(), arch.embedding_dim, config.seed),
    };
    table.trainable = config.fine_tune_embeddings;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let model: TopicModel = match kind {
        ModelKind::Dan => DanModel::new(kind.to_string(), labels, vocab, table, &arch.hidden, &mut rng).into(),
        ModelKind::Adan => {
            let mut m = AdanModel::new(kind.to_string(), labels, vocab, table, &arch.hidden, &mut rng);
            m.length_scaling = arch.length_scaling;
            m.into()
        }
    };
    fit(model, &train_data, dev, config)
}

/// Reuses the embeddings and hidden layers of `source` for a new label set.
/// The output layer (and for ADAN the attention table) starts fresh.
pub fn transfer_finetune(
    source: &TopicModel,
    train_data: &[LabeledExample],
    dev: &[LabeledExample],
    arch: &Architecture,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let train_data = match &config.downsample {
        Some(d) => downsample(train_data, &d.label, d.keep, config.seed),
        None => train_data.to_vec(),
    };
    let labels = label_set(&train_data);
    check_inputs(&train_data, dev, &labels)?;

    if source.embedding_dim() != arch.embedding_dim {
        return Err(Error::Shape(format!(
            "source embedding dimension {} differs from configured {}",
            source.embedding_dim(),
            arch.embedding_dim
        )));
    }
    let source_hidden = source.head().hidden_sizes();
    if source_hidden != arch.hidden {
        return Err(Error::Shape(format!(
            "source hidden layers {source_hidden:?} differ from configured {:?}",
            arch.hidden
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut model = source.clone();
    match &mut model {
        TopicModel::Dan(m) => {
            let width = m.head.hidden.last().map_or(m.embeddings.dim(), |l| l.out_dim());
            m.head.output = Mlp::new(width, &[], labels.len(), &mut rng).output;
            m.labels = labels;
        }
        TopicModel::Adan(m) => {
            if labels.len() != m.labels.len() {
                return Err(Error::Shape(format!(
                    "ADAN input width is tied to the label count: source has {} labels, target {}",
                    m.labels.len(),
                    labels.len()
                )));
            }
            let width = m.head.hidden.last().map_or(m.head.in_dim(), |l| l.out_dim());
            m.head.output = Mlp::new(width, &[], labels.len(), &mut rng).output;
            m.attention = random_attention(labels.len(), m.vocab.len(), &mut rng);
            m.labels = labels;
        }
    }
    model.set_embeddings_trainable(config.fine_tune_embeddings);
    fit(model, &train_data, dev, config)
}

fn fit(
    mut model: TopicModel,
    train_data: &[LabeledExample],
    dev: &[LabeledExample],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let labels = model.labels().to_vec();
    let (mut examples, skipped_empty) = encode(train_data, model.vocab(), &labels)?;
    if examples.is_empty() {
        return Err(Error::Data("no training utterance has any tokens".into()));
    }
    let dev_encoded: Vec<(Vec<usize>, usize)> = dev
        .iter()
        .map(|ex| {
            let label = labels
                .iter()
                .position(|l| *l == ex.topic)
                .ok_or_else(|| Error::Data(format!("dev label {:?} is not in the label set", ex.topic)))?;
            Ok((model.vocab().lookup(&tokenize(&ex.text)), label))
        })
        .collect::<Result<_>>()?;
    let empty_label = labels.iter().position(|l| l == PHATIC).unwrap_or(0);

    let block_sizes: Vec<usize> = model.param_blocks().iter().map(|b| b.len()).collect();
    let mut adam = AdamState::new(
        AdamConfig {
            lr: config.lr,
            ..AdamConfig::default()
        },
        &block_sizes,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));

    let mut history = Vec::new();
    let mut best = model.clone();
    let mut best_acc = dev_accuracy(&model, &dev_encoded, empty_label);
    let mut best_epoch = 0;
    let mut stale = 0;

    for epoch in 1..=config.epochs {
        examples.shuffle(&mut rng);
        let mut total_loss = 0.0;
        for batch in examples.chunks(config.batch_size) {
            let mut grads = model.zero_grads();
            let scale = 1.0 / batch.len() as f64;
            for ex in batch {
                let ids = word_dropout(&ex.ids, config.word_dropout, &mut rng);
                total_loss += model.accumulate_gradients(&ids, ex.label, scale, &mut grads)?;
            }
            adam.step(&mut model.param_blocks_mut(), &grads);
        }
        let acc = dev_accuracy(&model, &dev_encoded, empty_label);
        history.push(EpochRecord {
            epoch,
            train_loss: total_loss / examples.len() as f64,
            dev_accuracy: acc,
        });
        if acc > best_acc {
            best_acc = acc;
            best_epoch = epoch;
            best = model.clone();
            stale = 0;
        } else {
            stale += 1;
            if config.patience > 0 && stale >= config.patience {
                break;
            }
        }
    }

    Ok(TrainOutcome {
        model: best,
        history,
        best_epoch,
        best_dev_accuracy: best_acc,
        skipped_empty,
    })
}

fn word_dropout<R: Rng>(ids: &[usize], p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 {
        return ids.to_vec();
    }
    let kept: Vec<usize> = ids.iter().copied().filter(|_| rng.random::<f64>() >= p).collect();
    if kept.is_empty() {
        vec![ids[rng.random_range(0..ids.len())]]
    } else {
        kept
    }
}

fn dev_accuracy(model: &TopicModel, dev: &[(Vec<usize>, usize)], empty_label: usize) -> f64 {
    let correct = dev
        .iter()
        .filter(|(ids, label)| {
            let predicted = match model.probs(ids) {
                Ok(p) => argmax(&p),
                Err(_) => empty_label,
            };
            predicted == *label
        })
        .count();
    correct as f64 / dev.len() as f64
}
