//! Seeded generators for labeled utterance corpora and multi-bot
//! conversation corpora with known ground truth.

mod builtin;
mod corpus;
mod dialogs;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use builtin::{builtin_topic_specs, PHATIC_PHRASES};
pub use corpus::{generate_corpus, PlantedKeywords, SynthCorpus};
pub use dialogs::{
    generate_conversations, strip_labels, BotProfile, ConversationTruth, DialogSpec, RatingRule, SynthDialogs,
};

use crate::error::{Error, Result};
use crate::text::tokenize;

/// One synthetic topic: exclusive keywords, shared filler and the token
/// length range of generated utterances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    pub keywords: Vec<String>,
    pub filler: Vec<String>,
    pub min_len: usize,
    pub max_len: usize,
}

/// Checks the spec set: at least two topics, pairwise-disjoint keyword
/// lists, no keyword reused as filler, and single-token lowercase words.
pub fn validate_specs(specs: &[TopicSpec]) -> Result<()> {
    if specs.len() < 2 {
        return Err(Error::Config(format!("need at least 2 topic specs, got {}", specs.len())));
    }
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for spec in specs {
        if spec.name.is_empty() || spec.name == crate::classifiers::PHATIC {
            return Err(Error::Config(format!("invalid topic name {:?}", spec.name)));
        }
        if spec.keywords.is_empty() {
            return Err(Error::Config(format!("topic {} has no keywords", spec.name)));
        }
        if spec.min_len == 0 || spec.min_len > spec.max_len {
            return Err(Error::Config(format!(
                "topic {}: bad length range {}..={}",
                spec.name, spec.min_len, spec.max_len
            )));
        }
        if spec.filler.is_empty() && spec.min_len > 1 {
            return Err(Error::Config(format!("topic {} needs filler words", spec.name)));
        }
        for word in spec.keywords.iter().chain(&spec.filler) {
            if tokenize(word) != [word.as_str()] {
                return Err(Error::Config(format!("{word:?} is not a single normalized token")));
            }
        }
        for kw in &spec.keywords {
            if let Some(prev) = owner.insert(kw, &spec.name) {
                return Err(Error::Config(format!(
                    "keyword {kw:?} shared by topics {prev} and {}",
                    spec.name
                )));
            }
        }
    }
    for spec in specs {
        if let Some(w) = spec.filler.iter().find(|w| owner.contains_key(w.as_str())) {
            return Err(Error::Config(format!("filler word {w:?} of {} is also a keyword", spec.name)));
        }
    }
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("duplicate topic names".into()));
    }
    Ok(())
}

/// Topic names in spec order.
pub fn topic_names(specs: &[TopicSpec]) -> Vec<String> {
    specs.iter().map(|s| s.name.clone()).collect()
}
