use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{TopicPrediction, PHATIC};
use crate::error::{Error, Result};

/// `{source_name: {source_label: canonical_topic}}`
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelMap(pub HashMap<String, HashMap<String, String>>);

impl LabelMap {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Canonical topic for `label` predicted by `source`. `Phatic` maps to
    /// itself unless the source overrides it.
    pub fn canonical(&self, source: &str, label: &str) -> Result<String> {
        match self.0.get(source).and_then(|m| m.get(label)) {
            Some(c) => Ok(c.clone()),
            None if label == PHATIC => Ok(PHATIC.to_string()),
            None => Err(Error::Config(format!(
                "label {label:?} from source {source:?} has no canonical mapping"
            ))),
        }
    }
}

/// Keeps whichever prediction has the strictly lower normalized entropy
/// (`a` on ties) and rewrites its topic to the canonical name. With no map
/// the labels pass through unchanged.
pub fn ensemble_predict(
    a: &TopicPrediction,
    b: &TopicPrediction,
    label_map: Option<&LabelMap>,
) -> Result<TopicPrediction> {
    let mut chosen = if b.normalized_entropy < a.normalized_entropy {
        b.clone()
    } else {
        a.clone()
    };
    if let Some(map) = label_map {
        // both sides must be mappable, whichever wins
        map.canonical(&a.source, &a.topic)?;
        map.canonical(&b.source, &b.topic)?;
        chosen.topic = map.canonical(&chosen.source, &chosen.topic)?;
    }
    Ok(chosen)
}
