//! Text tables, CSV and JSON views of a study report.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::domain::ModelKind;
use crate::pipeline::{SelectionEntry, StudyReport};

pub const MAX_DECIMALS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("unsupported format {0:?}; expected text, csv or json")]
    UnsupportedFormat(String),
    #[error("{field} = {value} is outside [0, {MAX_DECIMALS}]")]
    InvalidDecimals { field: &'static str, value: usize },
    #[error("malformed study report: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for RenderFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(ReportError::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: RenderFormat,
    pub decimals_rmse: usize,
    pub decimals_pct: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            format: RenderFormat::Text,
            decimals_rmse: 6,
            decimals_pct: 2,
        }
    }
}

impl RenderOptions {
    pub fn with_format(format: RenderFormat) -> Self {
        Self {
            format,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        for (field, value) in [
            ("decimals_rmse", self.decimals_rmse),
            ("decimals_pct", self.decimals_pct),
        ] {
            if value > MAX_DECIMALS {
                return Err(ReportError::InvalidDecimals { field, value });
            }
        }
        Ok(())
    }
}

/// Lays out `|`-separated columns padded to a common width. The last column
/// is not padded, so lines carry no trailing blanks.
fn layout(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let last = widths.len() - 1;
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut out = String::new();
        for (i, cell) in cells.enumerate() {
            if i > 0 {
                out.push_str(" | ");
            }
            out.push_str(cell);
            if i < last {
                let pad = widths[i] - cell.chars().count();
                out.extend(std::iter::repeat_n(' ', pad));
            }
        }
        out.push('\n');
        out
    };
    let mut out = line(&mut headers.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

fn sorted_entries(report: &StudyReport) -> Vec<&SelectionEntry> {
    let mut entries: Vec<&SelectionEntry> = report.entries.iter().collect();
    entries.sort_by_key(|e| e.channel);
    entries
}

/// Winner per channel: label, algorithm, feature group, held-out RMSE.
pub fn render_selection_table(report: &StudyReport, opts: &RenderOptions) -> String {
    let rows: Vec<Vec<String>> = sorted_entries(report)
        .into_iter()
        .map(|e| {
            vec![
                e.channel.label(),
                e.kind.to_string(),
                e.group.number().to_string(),
                format!("{:.*}", opts.decimals_rmse, e.rmse),
            ]
        })
        .collect();
    layout(&["Label", "Best Algorithm", "Features Group", "RMSE"], &rows)
}

/// Percentage of test predictions per absolute-error range, in kOhm.
pub fn render_band_table(report: &StudyReport, opts: &RenderOptions) -> String {
    let d = opts.decimals_pct;
    let rows: Vec<Vec<String>> = sorted_entries(report)
        .into_iter()
        .map(|e| {
            let b = &e.bands;
            vec![
                e.channel.label(),
                format!("{:.*}", d, b.pct[0]),
                format!("{:.*}", d, b.pct[1]),
                format!("{:.*}", d, b.pct[2]),
                format!("{:.*}", d, b.cum_0_2),
                format!("{:.*}", d, b.cum_0_3),
                format!("{:.*}", d, b.overflow_pct()),
            ]
        })
        .collect();
    layout(&["Label", "0-1", "1-2", "2-3", "0-2", "0-3", "≥3"], &rows)
}

/// Number of channels won by each algorithm.
pub fn render_histogram_table(report: &StudyReport) -> String {
    let rows: Vec<Vec<String>> = ModelKind::ALL
        .into_iter()
        .map(|k| {
            let n = report.histogram.get(&k).copied().unwrap_or(0);
            vec![k.to_string(), n.to_string()]
        })
        .collect();
    layout(&["Algorithm", "Channels"], &rows)
}

/// All three tables, separated by blank lines.
pub fn render_text(report: &StudyReport, opts: &RenderOptions) -> String {
    let mut out = String::new();
    out.push_str(&render_selection_table(report, opts));
    out.push('\n');
    out.push_str(&render_band_table(report, opts));
    out.push('\n');
    out.push_str(&render_histogram_table(report));
    out
}

pub const CSV_HEADER: [&str; 16] = [
    "channel", "label", "kind", "group", "rmse", "n_test", "count_0_1", "count_1_2",
    "count_2_3", "count_ge_3", "pct_0_1", "pct_1_2", "pct_2_3", "pct_ge_3", "cum_0_2",
    "cum_0_3",
];

fn render_csv(report: &StudyReport) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for e in sorted_entries(report) {
        let b = &e.bands;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            e.channel.index(),
            e.channel.label(),
            e.kind.abbrev(),
            e.group.number(),
            e.rmse,
            b.n_test,
            b.counts[0],
            b.counts[1],
            b.counts[2],
            b.counts[3],
            b.pct[0],
            b.pct[1],
            b.pct[2],
            b.pct[3],
            b.cum_0_2,
            b.cum_0_3,
        );
    }
    out
}

/// Serializes the report in the requested format. CSV and JSON carry full
/// precision; the decimal settings only shape the text tables.
pub fn export_study(report: &StudyReport, opts: &RenderOptions) -> Result<Vec<u8>, ReportError> {
    opts.validate()?;
    let text = match opts.format {
        RenderFormat::Text => render_text(report, opts),
        RenderFormat::Csv => render_csv(report),
        RenderFormat::Json => study_to_json(report),
    };
    Ok(text.into_bytes())
}

pub fn study_to_json(report: &StudyReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("study report serializes");
    s.push('\n');
    s
}

pub fn study_from_json(text: &str) -> Result<StudyReport, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))
}
