use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Conversation, Speaker, Turn, Utterance};
use crate::error::{Error, Result};

/// A conversation line in JSONL form. Utterances are plain strings in raw
/// corpora and objects once classified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationRecord {
    pub id: String,
    pub bot_id: String,
    #[serde(default)]
    pub rating: Option<f64>,
    pub turns: Vec<TurnRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub user: UtteranceRecord,
    pub bot: UtteranceRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_error: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UtteranceRecord {
    Text(String),
    Classified {
        text: String,
        #[serde(default)]
        topic: Option<String>,
        #[serde(default)]
        entropy: Option<f64>,
        #[serde(default)]
        keywords: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<String>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        flagged: bool,
    },
}

impl UtteranceRecord {
    fn into_utterance(self, speaker: Speaker) -> Utterance {
        match self {
            UtteranceRecord::Text(text) => Utterance::new(speaker, text),
            UtteranceRecord::Classified {
                text,
                topic,
                entropy,
                keywords,
                source,
                flagged,
            } => Utterance {
                speaker,
                text,
                topic,
                entropy,
                keywords,
                source,
                flagged,
            },
        }
    }
}

impl From<&Utterance> for UtteranceRecord {
    /// Unlabeled utterances round-trip as plain strings.
    fn from(u: &Utterance) -> Self {
        let unlabeled =
            u.topic.is_none() && u.entropy.is_none() && u.keywords.is_empty() && u.source.is_none() && !u.flagged;
        if unlabeled {
            return UtteranceRecord::Text(u.text.clone());
        }
        UtteranceRecord::Classified {
            text: u.text.clone(),
            topic: u.topic.clone(),
            entropy: u.entropy,
            keywords: u.keywords.clone(),
            source: u.source.clone(),
            flagged: u.flagged,
        }
    }
}

impl TryFrom<ConversationRecord> for Conversation {
    type Error = Error;

    fn try_from(rec: ConversationRecord) -> Result<Self> {
        if let Some(r) = rec.rating {
            if !(1.0..=5.0).contains(&r) {
                return Err(Error::Data(format!(
                    "conversation {}: rating {r} outside [1, 5]",
                    rec.id
                )));
            }
        }
        let turns = rec
            .turns
            .into_iter()
            .enumerate()
            .map(|(i, t)| Turn {
                index: i + 1,
                user: t.user.into_utterance(Speaker::User),
                bot: t.bot.into_utterance(Speaker::Bot),
                response_error: t.response_error,
            })
            .collect();
        Ok(Conversation {
            id: rec.id,
            bot_id: rec.bot_id,
            rating: rec.rating,
            turns,
        })
    }
}

impl From<&Conversation> for ConversationRecord {
    fn from(c: &Conversation) -> Self {
        ConversationRecord {
            id: c.id.clone(),
            bot_id: c.bot_id.clone(),
            rating: c.rating,
            turns: c
                .turns
                .iter()
                .map(|t| TurnRecord {
                    user: (&t.user).into(),
                    bot: (&t.bot).into(),
                    response_error: t.response_error,
                })
                .collect(),
        }
    }
}

/// Reads a conversation corpus, raw or classified. Blank lines are skipped.
pub fn read_conversations(path: &Path) -> Result<Vec<Conversation>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let rec: ConversationRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        out.push(Conversation::try_from(rec).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}

/// Writes conversations one per line, atomically.
pub fn write_conversations(path: &Path, conversations: &[Conversation]) -> Result<()> {
    crate::io::write_atomic(path, |w| {
        let mut w = BufWriter::new(w);
        for c in conversations {
            serde_json::to_writer(&mut w, &ConversationRecord::from(c))?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    })
}
