use serde::{Deserialize, Serialize};

use super::{Conversation, Turn, PHATIC};
use crate::error::{Error, Result};

/// A run of at least two consecutive topic-specific turns on one topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubConversation {
    pub topic: String,
    /// 1-based indices of the member turns.
    pub turn_indices: Vec<usize>,
    pub l_s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationResult {
    pub subconvs: Vec<SubConversation>,
    /// Number of topic-specific turns, inside a sub-conversation or not.
    pub l_c: usize,
    pub turn_topics: Vec<String>,
    /// Turns whose user and bot sides carried different non-Phatic topics.
    pub mixed_turns: Vec<usize>,
}

/// Agreeing sides give their topic; a single Phatic side defers to the
/// other; two Phatic sides stay Phatic; disagreeing topical sides resolve to
/// the bot's topic.
pub fn resolve_turn_topic(turn: &Turn) -> Result<String> {
    let user = turn.user.topic.as_deref().ok_or(Error::MissingTopic {
        turn: turn.index,
        side: "user",
    })?;
    let bot = turn.bot.topic.as_deref().ok_or(Error::MissingTopic {
        turn: turn.index,
        side: "bot",
    })?;
    Ok(match (user == PHATIC, bot == PHATIC) {
        (true, true) => PHATIC,
        (true, false) => bot,
        (false, true) => user,
        (false, false) => bot,
    }
    .to_string())
}

fn is_mixed(turn: &Turn) -> bool {
    match (turn.user.topic.as_deref(), turn.bot.topic.as_deref()) {
        (Some(u), Some(b)) => u != PHATIC && b != PHATIC && u != b,
        _ => false,
    }
}

/// Segments a sequence of resolved per-turn topics. Phatic turns are
/// transparent: they neither extend nor break a run.
pub fn segment_topics<S: AsRef<str>>(topics: &[S]) -> (Vec<SubConversation>, usize) {
    let mut subconvs = Vec::new();
    let mut l_c = 0;
    let mut run: Option<(String, Vec<usize>)> = None;

    let close = |run: Option<(String, Vec<usize>)>, subconvs: &mut Vec<SubConversation>| {
        if let Some((topic, turns)) = run {
            if turns.len() >= 2 {
                subconvs.push(SubConversation {
                    topic,
                    l_s: turns.len(),
                    turn_indices: turns,
                });
            }
        }
    };

    for (i, topic) in topics.iter().enumerate() {
        let topic = topic.as_ref();
        if topic == PHATIC {
            continue;
        }
        l_c += 1;
        match &mut run {
            Some((current, turns)) if current == topic => turns.push(i + 1),
            _ => {
                close(run.take(), &mut subconvs);
                run = Some((topic.to_string(), vec![i + 1]));
            }
        }
    }
    close(run, &mut subconvs);
    (subconvs, l_c)
}

pub fn segment(conv: &Conversation) -> Result<SegmentationResult> {
    let turn_topics = conv.turns.iter().map(resolve_turn_topic).collect::<Result<Vec<_>>>()?;
    let mixed_turns = conv.turns.iter().filter(|t| is_mixed(t)).map(|t| t.index).collect();
    let (subconvs, l_c) = segment_topics(&turn_topics);
    Ok(SegmentationResult {
        subconvs,
        l_c,
        turn_topics,
        mixed_turns,
    })
}
