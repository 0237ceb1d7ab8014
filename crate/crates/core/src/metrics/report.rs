use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    dialog_breadth, dialog_depth, keyword_metrics, mean_rating, rer, system_breadth_avg, system_depth,
    topic_histogram, KeywordMetrics,
};
use crate::dialog::{segment, Conversation, SegmentationResult, Speaker};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogMetrics {
    pub id: String,
    pub depth: Option<f64>,
    pub breadth: usize,
    pub l_c: usize,
    pub turns: usize,
    pub subconversations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotMetricsReport {
    pub bot_id: String,
    pub n_conversations: usize,
    pub n_rated: usize,
    pub mean_rating: Option<f64>,
    /// Pooled mean sub-conversation length.
    pub depth: Option<f64>,
    pub breadth_avg: f64,
    pub n_subconversations: usize,
    pub topic_counts: BTreeMap<String, usize>,
    pub topic_frequency: Option<BTreeMap<String, f64>>,
    pub topic_entropy: Option<f64>,
    pub topic_stddev: Option<f64>,
    pub keywords_bot: KeywordMetrics,
    pub keywords_user: KeywordMetrics,
    pub rer: Option<f64>,
    pub rer_annotated_turns: usize,
    /// Mean number of turns per conversation.
    pub avg_conversation_length: f64,
    /// Mean number of topic-specific turns per conversation.
    pub avg_topic_specific_turns: f64,
    pub mixed_turns: usize,
    pub dialogs: Vec<DialogMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_bots: usize,
    pub n_conversations: usize,
    pub n_subconversations: usize,
    pub canonical_topics: Vec<String>,
    pub depth: Option<f64>,
    pub breadth_avg: Option<f64>,
    pub rer: Option<f64>,
    pub mean_rating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub corpus: CorpusSummary,
    pub bots: Vec<BotMetricsReport>,
}

/// Columns of the flat per-bot export, in order.
pub const TSV_COLUMNS: &[&str] = &[
    "bot_id",
    "n_conversations",
    "mean_rating",
    "rer",
    "depth",
    "avg_conversation_length",
    "avg_topic_specific_turns",
    "breadth_avg",
    "topic_entropy",
    "topic_stddev",
    "keyword_coverage_bot",
    "keyword_total_bot",
    "keyword_frequency_bot",
    "keyword_coverage_user",
    "keyword_total_user",
    "keyword_frequency_user",
];

fn bot_report(bot_id: &str, convs: &[&Conversation], segs: &[SegmentationResult], topics: &[String]) -> Result<BotMetricsReport> {
    let hist = topic_histogram(segs, topics);
    let err = rer(convs.iter().copied());
    let n = convs.len() as f64;
    let dialogs = convs
        .iter()
        .zip(segs)
        .map(|(c, s)| DialogMetrics {
            id: c.id.clone(),
            depth: dialog_depth(s),
            breadth: dialog_breadth(s),
            l_c: s.l_c,
            turns: c.turns.len(),
            subconversations: s.subconvs.len(),
        })
        .collect();
    Ok(BotMetricsReport {
        bot_id: bot_id.to_string(),
        n_conversations: convs.len(),
        n_rated: convs.iter().filter(|c| c.rating.is_some()).count(),
        mean_rating: mean_rating(convs.iter().copied()),
        depth: system_depth(segs),
        breadth_avg: system_breadth_avg(segs)?,
        n_subconversations: segs.iter().map(|s| s.subconvs.len()).sum(),
        topic_counts: hist.counts,
        topic_frequency: hist.frequency,
        topic_entropy: hist.entropy,
        topic_stddev: hist.stddev,
        keywords_bot: keyword_metrics(convs.iter().copied(), Speaker::Bot),
        keywords_user: keyword_metrics(convs.iter().copied(), Speaker::User),
        rer: err.rer,
        rer_annotated_turns: err.annotated_turns,
        avg_conversation_length: convs.iter().map(|c| c.turns.len()).sum::<usize>() as f64 / n,
        avg_topic_specific_turns: segs.iter().map(|s| s.l_c).sum::<usize>() as f64 / n,
        mixed_turns: segs.iter().map(|s| s.mixed_turns.len()).sum(),
        dialogs,
    })
}

/// Segments every conversation and aggregates per bot, bots in sorted
/// `bot_id` order.
pub fn compute_report(conversations: &[Conversation], canonical_topics: &[String]) -> Result<MetricsReport> {
    let segs = conversations.iter().map(segment).collect::<Result<Vec<_>>>()?;
    let mut by_bot: BTreeMap<&str, (Vec<&Conversation>, Vec<SegmentationResult>)> = BTreeMap::new();
    for (c, s) in conversations.iter().zip(&segs) {
        let entry = by_bot.entry(c.bot_id.as_str()).or_default();
        entry.0.push(c);
        entry.1.push(s.clone());
    }
    let bots = by_bot
        .iter()
        .map(|(bot, (convs, bot_segs))| bot_report(bot, convs, bot_segs, canonical_topics))
        .collect::<Result<Vec<_>>>()?;

    let corpus = CorpusSummary {
        n_bots: bots.len(),
        n_conversations: conversations.len(),
        n_subconversations: segs.iter().map(|s| s.subconvs.len()).sum(),
        canonical_topics: canonical_topics.to_vec(),
        depth: system_depth(&segs),
        breadth_avg: system_breadth_avg(&segs).ok(),
        rer: rer(conversations).rer,
        mean_rating: mean_rating(conversations),
    };
    Ok(MetricsReport { corpus, bots })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

impl BotMetricsReport {
    fn tsv_row(&self) -> Vec<String> {
        let kw = |k: &KeywordMetrics| {
            let undefined = k.empty;
            [
                k.coverage.to_string(),
                k.total.to_string(),
                if undefined { "NA".to_string() } else { k.frequency.to_string() },
            ]
        };
        let mut row = vec![
            self.bot_id.clone(),
            self.n_conversations.to_string(),
            fmt_opt(self.mean_rating),
            fmt_opt(self.rer),
            fmt_opt(self.depth),
            self.avg_conversation_length.to_string(),
            self.avg_topic_specific_turns.to_string(),
            self.breadth_avg.to_string(),
            fmt_opt(self.topic_entropy),
            fmt_opt(self.topic_stddev),
        ];
        row.extend(kw(&self.keywords_bot));
        row.extend(kw(&self.keywords_user));
        row
    }
}

impl MetricsReport {
    pub fn to_tsv(&self) -> String {
        let mut out = TSV_COLUMNS.join("\t");
        out.push('\n');
        for bot in &self.bots {
            let _ = writeln!(out, "{}", bot.tsv_row().join("\t"));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
