//! Topic depth, breadth and keyword-coverage metrics, response error rate,
//! rating aggregation and rank correlation against ratings.

mod correlate;
mod report;
mod stats;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use correlate::{correlate, correlate_tsv, CorrelationRow, CorrelationStatus, MetricTable};
pub use report::{compute_report, BotMetricsReport, CorpusSummary, DialogMetrics, MetricsReport, TSV_COLUMNS};
pub use stats::{average_ranks, pearson, spearman};

use crate::dialog::{Conversation, SegmentationResult, Speaker};
use crate::error::{Error, Result};

/// Mean sub-conversation length of one conversation; `None` without any.
pub fn dialog_depth(seg: &SegmentationResult) -> Option<f64> {
    if seg.subconvs.is_empty() {
        return None;
    }
    let total: usize = seg.subconvs.iter().map(|s| s.l_s).sum();
    Some(total as f64 / seg.subconvs.len() as f64)
}

/// Mean length over every sub-conversation of a bot, pooled across its
/// conversations.
pub fn system_depth(segs: &[SegmentationResult]) -> Option<f64> {
    let (total, count) = segs
        .iter()
        .flat_map(|s| &s.subconvs)
        .fold((0usize, 0usize), |(t, n), s| (t + s.l_s, n + 1));
    (count > 0).then(|| total as f64 / count as f64)
}

/// Number of distinct sub-conversation topics.
pub fn dialog_breadth(seg: &SegmentationResult) -> usize {
    let mut topics: Vec<&str> = seg.subconvs.iter().map(|s| s.topic.as_str()).collect();
    topics.sort_unstable();
    topics.dedup();
    topics.len()
}

/// Mean breadth over all conversations; those without sub-conversations
/// count as zero.
pub fn system_breadth_avg(segs: &[SegmentationResult]) -> Result<f64> {
    if segs.is_empty() {
        return Err(Error::Data("breadth of an empty corpus".into()));
    }
    let total: usize = segs.iter().map(dialog_breadth).sum();
    Ok(total as f64 / segs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicHistogram {
    /// Sub-conversations per topic, every topic of the effective set listed.
    pub counts: BTreeMap<String, usize>,
    /// `counts` normalized to sum to one; `None` without sub-conversations.
    pub frequency: Option<BTreeMap<String, f64>>,
    /// Entropy of `frequency` divided by `ln |topics|`.
    pub entropy: Option<f64>,
    /// Population standard deviation of `frequency` over all topics.
    pub stddev: Option<f64>,
}

/// Histogram over `canonical_topics`. Topics seen in sub-conversations but
/// absent from the canonical list are added to the set.
pub fn topic_histogram(segs: &[SegmentationResult], canonical_topics: &[String]) -> TopicHistogram {
    let mut counts: BTreeMap<String, usize> = canonical_topics
        .iter()
        .filter(|t| t.as_str() != crate::classifiers::PHATIC)
        .map(|t| (t.clone(), 0))
        .collect();
    for sub in segs.iter().flat_map(|s| &s.subconvs) {
        *counts.entry(sub.topic.clone()).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return TopicHistogram {
            counts,
            frequency: None,
            entropy: None,
            stddev: None,
        };
    }
    let frequency: BTreeMap<String, f64> = counts
        .iter()
        .map(|(t, &n)| (t.clone(), n as f64 / total as f64))
        .collect();
    let k = frequency.len() as f64;
    let h: f64 = frequency.values().filter(|&&f| f > 0.0).map(|&f| -f * f.ln()).sum();
    let entropy = if k > 1.0 { (h / k.ln()).clamp(0.0, 1.0) } else { 0.0 };
    let mean = 1.0 / k;
    let var = frequency.values().map(|f| (f - mean).powi(2)).sum::<f64>() / k;
    TopicHistogram {
        counts,
        frequency: Some(frequency),
        entropy: Some(entropy),
        stddev: Some(var.sqrt()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeywordMetrics {
    /// Distinct keywords.
    pub coverage: usize,
    /// Keyword occurrences.
    pub total: usize,
    /// Mean occurrences per distinct keyword.
    pub frequency: f64,
    /// Set when no keywords were found; the numbers above are then zero.
    pub empty: bool,
}

pub fn keyword_metrics<'a, I>(conversations: I, side: Speaker) -> KeywordMetrics
where
    I: IntoIterator<Item = &'a Conversation>,
{
    keyword_stream_metrics(
        conversations
            .into_iter()
            .flat_map(|c| c.utterances(side))
            .flat_map(|u| u.keywords.iter().map(String::as_str)),
    )
}

pub fn keyword_stream_metrics<'a>(keywords: impl IntoIterator<Item = &'a str>) -> KeywordMetrics {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for kw in keywords {
        *counts.entry(kw).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return KeywordMetrics {
            coverage: 0,
            total: 0,
            frequency: 0.0,
            empty: true,
        };
    }
    KeywordMetrics {
        coverage: counts.len(),
        total,
        frequency: total as f64 / counts.len() as f64,
        empty: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseErrorRate {
    /// Erroneous fraction of annotated turns; `None` without annotations.
    pub rer: Option<f64>,
    pub annotated_turns: usize,
    pub erroneous_turns: usize,
    pub total_turns: usize,
}

pub fn rer<'a, I>(conversations: I) -> ResponseErrorRate
where
    I: IntoIterator<Item = &'a Conversation>,
{
    let mut out = ResponseErrorRate {
        rer: None,
        annotated_turns: 0,
        erroneous_turns: 0,
        total_turns: 0,
    };
    for turn in conversations.into_iter().flat_map(|c| &c.turns) {
        out.total_turns += 1;
        if let Some(err) = turn.response_error {
            out.annotated_turns += 1;
            out.erroneous_turns += usize::from(err);
        }
    }
    if out.annotated_turns > 0 {
        out.rer = Some(out.erroneous_turns as f64 / out.annotated_turns as f64);
    }
    out
}

/// Mean over rated conversations; `None` when none is rated.
pub fn mean_rating<'a, I>(conversations: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a Conversation>,
{
    let (sum, n) = conversations
        .into_iter()
        .filter_map(|c| c.rating)
        .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
    (n > 0).then(|| sum / n as f64)
}
