use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::AdanModel;

pub const DEFAULT_KEYWORD_COUNT: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub token: String,
    pub saliency: f64,
}

/// Ranks the distinct tokens of an utterance by their raw attention-table
/// saliency for `topic`, highest first, earlier position winning ties, and
/// returns the top `n`. Tokens in `stoplist` are skipped.
pub fn extract_keywords(
    model: &AdanModel,
    tokens: &[String],
    ids: &[usize],
    topic: usize,
    n: usize,
    stoplist: Option<&HashSet<String>>,
) -> Vec<Keyword> {
    let mut seen = HashSet::new();
    let mut ranked: Vec<Keyword> = tokens
        .iter()
        .zip(ids)
        .filter(|(t, _)| stoplist.is_none_or(|s| !s.contains(*t)))
        .filter(|(t, _)| seen.insert(t.as_str()))
        .map(|(t, &id)| Keyword {
            token: t.clone(),
            saliency: model.attention.get(topic, id),
        })
        .collect();
    // stable sort keeps first-occurrence order among equal saliencies
    ranked.sort_by(|a, b| b.saliency.total_cmp(&a.saliency));
    ranked.truncate(n.max(1));
    ranked
}
