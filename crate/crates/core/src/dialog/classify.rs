use std::collections::HashSet;

use super::{Conversation, Utterance, PHATIC};
use crate::classifiers::{
    ensemble_predict, extract_keywords, AdanModel, LabelMap, TopicModel, TopicPrediction,
    DEFAULT_KEYWORD_COUNT,
};
use crate::error::Result;
use crate::netcore::argmax;
use crate::text::tokenize;

/// Assigns canonical topics, entropies and keywords to every utterance of a
/// conversation using one model or a two-model entropy ensemble.
#[derive(Debug, Clone, Copy)]
pub struct ConversationClassifier<'a> {
    pub model_a: &'a TopicModel,
    pub model_b: Option<&'a TopicModel>,
    /// Without a map, predicted labels are used as canonical topics.
    pub label_map: Option<&'a LabelMap>,
    /// Dedicated keyword extractor, used regardless of which model wins.
    pub keyword_model: Option<&'a AdanModel>,
    pub n_keywords: usize,
    pub stoplist: Option<&'a HashSet<String>>,
}

impl<'a> ConversationClassifier<'a> {
    pub fn new(model_a: &'a TopicModel) -> Self {
        ConversationClassifier {
            model_a,
            model_b: None,
            label_map: None,
            keyword_model: None,
            n_keywords: DEFAULT_KEYWORD_COUNT,
            stoplist: None,
        }
    }

    fn predict(&self, model: &TopicModel, text: &str) -> TopicPrediction {
        model.predict_with_keywords(text, self.n_keywords, self.stoplist)
    }

    /// Fails only on configuration problems such as an unmapped label.
    /// Utterances without tokens come back as flagged Phatic.
    pub fn classify_utterance(&self, utterance: &mut Utterance) -> Result<()> {
        let a = self.predict(self.model_a, &utterance.text);
        let chosen = match self.model_b {
            Some(model_b) => {
                let b = self.predict(model_b, &utterance.text);
                ensemble_predict(&a, &b, self.label_map)?
            }
            None => ensemble_predict(&a, &a, self.label_map)?,
        };

        utterance.entropy = Some(chosen.normalized_entropy);
        utterance.source = Some(chosen.source.clone());
        if chosen.empty {
            utterance.topic = Some(PHATIC.to_string());
            utterance.flagged = true;
            utterance.keywords.clear();
            return Ok(());
        }
        utterance.topic = Some(chosen.topic.clone());
        utterance.flagged = false;
        utterance.keywords = match self.keyword_model {
            Some(kw_model) => {
                let tokens = tokenize(&utterance.text);
                let ids = kw_model.vocab.lookup(&tokens);
                match kw_model.forward(&ids) {
                    Ok(cache) => {
                        let k = argmax(&cache.head.probs);
                        extract_keywords(kw_model, &tokens, &ids, k, self.n_keywords, self.stoplist)
                            .into_iter()
                            .map(|kw| kw.token)
                            .collect()
                    }
                    Err(_) => Vec::new(),
                }
            }
            None => chosen
                .keywords
                .unwrap_or_default()
                .into_iter()
                .map(|kw| kw.token)
                .collect(),
        };
        Ok(())
    }

    pub fn classify_conversation(&self, conv: &Conversation) -> Result<Conversation> {
        let mut out = conv.clone();
        for turn in &mut out.turns {
            self.classify_utterance(&mut turn.user)?;
            self.classify_utterance(&mut turn.bot)?;
        }
        Ok(out)
    }
}
