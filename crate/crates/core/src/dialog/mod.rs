//! Conversations, per-turn topic resolution and segmentation into
//! topic-coherent sub-conversations.

mod classify;
mod io;
mod segment;

use serde::{Deserialize, Serialize};

pub use classify::ConversationClassifier;
pub use io::{read_conversations, write_conversations, ConversationRecord, TurnRecord, UtteranceRecord};
pub use segment::{resolve_turn_topic, segment, segment_topics, SegmentationResult, SubConversation};

pub use crate::classifiers::PHATIC;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    Bot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: Speaker,
    pub text: String,
    /// Canonical topic (or `Phatic`) once classified.
    pub topic: Option<String>,
    /// Normalized entropy of the winning prediction.
    pub entropy: Option<f64>,
    pub keywords: Vec<String>,
    /// Which classifier produced the topic.
    pub source: Option<String>,
    /// Classification fell back to the empty-utterance policy.
    pub flagged: bool,
}

impl Utterance {
    pub fn new(speaker: Speaker, text: impl Into<String>) -> Self {
        Utterance {
            speaker,
            text: text.into(),
            topic: None,
            entropy: None,
            keywords: Vec::new(),
            source: None,
            flagged: false,
        }
    }

    pub fn with_topic(mut self, topic: impl Into<String>) -> Self {
        self.topic = Some(topic.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    /// 1-based position in the conversation.
    pub index: usize,
    pub user: Utterance,
    pub bot: Utterance,
    pub response_error: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conversation {
    pub id: String,
    pub bot_id: String,
    pub rating: Option<f64>,
    pub turns: Vec<Turn>,
}

impl Conversation {
    pub fn new(id: impl Into<String>, bot_id: impl Into<String>) -> Self {
        Conversation {
            id: id.into(),
            bot_id: bot_id.into(),
            rating: None,
            turns: Vec::new(),
        }
    }

    /// Appends a turn with already-assigned topics.
    pub fn push_labeled(&mut self, user: (&str, &str), bot: (&str, &str)) {
        let index = self.turns.len() + 1;
        self.turns.push(Turn {
            index,
            user: Utterance::new(Speaker::User, user.0).with_topic(user.1),
            bot: Utterance::new(Speaker::Bot, bot.0).with_topic(bot.1),
            response_error: None,
        });
    }

    pub fn utterances(&self, speaker: Speaker) -> impl Iterator<Item = &Utterance> {
        self.turns.iter().map(move |t| match speaker {
            Speaker::User => &t.user,
            Speaker::Bot => &t.bot,
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The four-turn music/politics example conversation.
    pub fn music_politics() -> Conversation {
        let mut c = Conversation::new("table2", "bot");
        c.push_labeled(
            ("Let's talk about music", "Music"),
            ("Sure, what's your favorite musician?", "Music"),
        );
        c.push_labeled(
            ("Bob Dylan", "Music"),
            ("Bob Dylan is an American songwriter, singer, painter, and writer.", "Music"),
        );
        c.push_labeled(("Cool", PHATIC), ("Do you want to know more about Bob Dylan?", "Music"));
        c.push_labeled(
            ("No, let's talk about politics instead", "Politics"),
            ("Sure, here are the latest updates about Donald Trump", "Politics"),
        );
        c
    }
}
