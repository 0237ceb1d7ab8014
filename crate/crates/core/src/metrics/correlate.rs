use std::fmt;

use serde::{Deserialize, Serialize};

use super::spearman;
use crate::error::{Error, Result};

/// Column holding the per-bot mean rating.
pub const RATING_COLUMN: &str = "mean_rating";
const MIN_BOTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationStatus {
    Ok,
    /// Fewer than three bots with both values defined.
    Insufficient,
    /// Zero rank variance in the metric or the ratings.
    Undefined,
}

impl fmt::Display for CorrelationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationStatus::Ok => "ok",
            CorrelationStatus::Insufficient => "insufficient",
            CorrelationStatus::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub rho: Option<f64>,
    pub n_bots: usize,
    pub status: CorrelationStatus,
}

/// Per-bot metric columns; `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricTable {
    pub bots: Vec<String>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl MetricTable {
    /// Parses a tab-separated table whose first column names the bot.
    /// `NA` and empty cells are undefined. Columns holding any other
    /// non-numeric cell are treated as text and dropped.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = match lines.next() {
            Some(h) => h.split('\t').collect(),
            None => return Ok(MetricTable::default()),
        };
        let mut bots = Vec::new();
        let width = header.len().saturating_sub(1);
        let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); width];
        let mut textual = vec![false; width];
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != header.len() {
                return Err(Error::Data(format!(
                    "metrics table row {} has {} fields, header has {}",
                    n + 2,
                    fields.len(),
                    header.len()
                )));
            }
            bots.push(fields[0].to_string());
            for ((col, text), field) in cells.iter_mut().zip(&mut textual).zip(&fields[1..]) {
                let field = field.trim();
                let value = field.parse::<f64>().ok().filter(|v| v.is_finite());
                if value.is_none() && !field.is_empty() && field != "NA" {
                    *text = true;
                }
                col.push(value);
            }
        }
        let columns = header[1..]
            .iter()
            .zip(cells)
            .zip(textual)
            .filter(|(_, text)| !text)
            .map(|((name, vals), _)| (name.to_string(), vals))
            .collect();
        Ok(MetricTable { bots, columns })
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// One Spearman correlation per metric column against `ratings`, dropping
/// bots where either value is undefined.
pub fn correlate(table: &MetricTable, ratings: &[Option<f64>]) -> Vec<CorrelationRow> {
    table
        .columns
        .iter()
        .filter(|(name, _)| name != RATING_COLUMN)
        .map(|(name, values)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = values
                .iter()
                .zip(ratings)
                .filter_map(|(v, r)| Some(((*v)?, (*r)?)))
                .unzip();
            let n_bots = xs.len();
            let (rho, status) = if n_bots < MIN_BOTS {
                (None, CorrelationStatus::Insufficient)
            } else {
                match spearman(&xs, &ys) {
                    Some(r) => (Some(r), CorrelationStatus::Ok),
                    None => (None, CorrelationStatus::Undefined),
                }
            };
            CorrelationRow {
                metric: name.clone(),
                rho,
                n_bots,
                status,
            }
        })
        .collect()
}

/// Reads a per-bot metrics TSV and returns the correlation TSV
/// (`metric, rho, n_bots, status`).
pub fn correlate_tsv(metrics_tsv: &str) -> Result<(Vec<CorrelationRow>, String)> {
    let table = MetricTable::from_tsv(metrics_tsv)?;
    let ratings = table
        .column(RATING_COLUMN)
        .ok_or_else(|| Error::Data(format!("metrics table has no {RATING_COLUMN} column")))?
        .to_vec();
    let rows = correlate(&table, &ratings);
    let mut out = String::from("metric\trho\tn_bots\tstatus\n");
    for row in &rows {
        let rho = row.rho.map_or_else(|| "NA".to_string(), |r| r.to_string());
        out.push_str(&format!("{}\t{}\t{}\t{}\n", row.metric, rho, row.n_bots, row.status));
    }
    Ok((rows, out))
}
