use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{validate_specs, TopicSpec};
use crate::classifiers::LabeledExample;
use crate::error::{Error, Result};

const MAX_PLANTED: usize = 3;

/// Ground truth for one generated utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedKeywords {
    pub index: usize,
    pub topic: String,
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub examples: Vec<LabeledExample>,
    pub planted: Vec<PlantedKeywords>,
}

/// Draws one utterance: filler words with 1-3 keywords at random
/// positions. `pick` chooses each planted keyword.
pub(crate) fn utterance<R: Rng>(
    spec: &TopicSpec,
    rng: &mut R,
    mut pick: impl FnMut(&mut R) -> String,
) -> (String, Vec<String>) {
    let len = rng.random_range(spec.min_len..=spec.max_len);
    let n_kw = rng.random_range(1..=MAX_PLANTED.min(len));
    let mut words: Vec<String> = (0..len - n_kw)
        .map(|_| spec.filler.choose(rng).expect("validated filler").clone())
        .collect();
    let mut planted = Vec::with_capacity(n_kw);
    for _ in 0..n_kw {
        let kw = pick(rng);
        let pos = rng.random_range(0..=words.len());
        words.insert(pos, kw.clone());
        planted.push(kw);
    }
    (words.join(" "), planted)
}

/// Generates `n` labeled utterances with topics assigned round-robin in
/// spec order, then shuffled. Identical seeds give identical corpora.
pub fn generate_corpus(specs: &[TopicSpec], n: usize, seed: u64) -> Result<SynthCorpus> {
    validate_specs(specs)?;
    if n < specs.len() {
        return Err(Error::Config(format!(
            "corpus size {n} smaller than the number of topics {}",
            specs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<(LabeledExample, Vec<String>)> = (0..n)
        .map(|i| {
            let spec = &specs[i % specs.len()];
            let (text, planted) = utterance(spec, &mut rng, |r| spec.keywords.choose(r).expect("validated").clone());
            (
                LabeledExample {
                    text,
                    topic: spec.name.clone(),
                },
                planted,
            )
        })
        .collect();
    rows.shuffle(&mut rng);
    let (examples, planted) = rows
        .into_iter()
        .enumerate()
        .map(|(index, (ex, keywords))| {
            let topic = ex.topic.clone();
            (ex, PlantedKeywords { index, topic, keywords })
        })
        .unzip();
    Ok(SynthCorpus { examples, planted })
}
