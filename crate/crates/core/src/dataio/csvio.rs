use std::io::Read;

use super::DataError;
use crate::domain::{Cohort, PatientRecord, CHANNELS};

pub const AGE_COLUMN: &str = "age";

pub(crate) fn intra_column(c: usize) -> String {
    format!("ei_intra_{c}")
}

pub(crate) fn label_column(c: usize) -> String {
    format!("ei_1m_{c}")
}

/// Header in canonical order.
fn header(labeled: bool) -> Vec<String> {
    let mut h = vec![AGE_COLUMN.to_string()];
    h.extend((1..=CHANNELS).map(intra_column));
    if labeled {
        h.extend((1..=CHANNELS).map(label_column));
    }
    h
}

fn find(headers: &csv::StringRecord, name: &str) -> Result<Option<usize>, DataError> {
    let mut hits = headers.iter().enumerate().filter(|(_, h)| h.trim() == name);
    let first = hits.next().map(|(i, _)| i);
    if hits.next().is_some() {
        return Err(DataError::DuplicateColumn(name.to_string()));
    }
    Ok(first)
}

fn require(headers: &csv::StringRecord, name: &str) -> Result<usize, DataError> {
    find(headers, name)?.ok_or_else(|| DataError::MissingColumn(name.to_string()))
}

fn number(raw: &str, row: usize, column: &str) -> Result<f64, DataError> {
    let bad = || DataError::BadNumber {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    };
    let v: f64 = raw.trim().parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn impedance(raw: &str, row: usize, column: &str) -> Result<f64, DataError> {
    let v = number(raw, row, column)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(DataError::NonPositive {
            row,
            column: column.to_string(),
        })
    }
}

/// Parses a cohort CSV. Columns are located by name; unknown columns are
/// ignored. Label columns are optional but must be all present or all absent.
/// Rows are numbered from 1 (first data row) in errors.
pub fn parse_cohort_csv<R: Read>(input: R) -> Result<Cohort, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| DataError::Malformed(e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(DataError::EmptyFile);
    }
    let age = require(&headers, AGE_COLUMN)?;
    let intra = (1..=CHANNELS)
        .map(|c| require(&headers, &intra_column(c)).map(|i| (i, intra_column(c))))
        .collect::<Result<Vec<_>, _>>()?;
    let label_pos = (1..=CHANNELS)
        .map(|c| find(&headers, &label_column(c)))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = if label_pos.iter().all(Option::is_none) {
        None
    } else if let Some(missing) = label_pos.iter().position(Option::is_none) {
        return Err(DataError::MissingColumn(label_column(missing + 1)));
    } else {
        Some(
            label_pos
                .into_iter()
                .zip(1..=CHANNELS)
                .map(|(p, c)| (p.expect("checked"), label_column(c)))
                .collect::<Vec<_>>(),
        )
    };

    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| DataError::Malformed(e.to_string()))?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != headers.len() {
            return Err(DataError::RaggedRow {
                row,
                expected: headers.len(),
                found: rec.len(),
            });
        }
        let age_v = number(&rec[age], row, AGE_COLUMN)?;
        if age_v < 0.0 {
            return Err(DataError::NegativeAge { row });
        }
        let mut ei_intra = [0.0; CHANNELS];
        for (slot, (pos, name)) in ei_intra.iter_mut().zip(&intra) {
            *slot = impedance(&rec[*pos], row, name)?;
        }
        let ei_1m = match &labels {
            None => None,
            Some(cols) => {
                let mut l = [0.0; CHANNELS];
                for (slot, (pos, name)) in l.iter_mut().zip(cols) {
                    *slot = impedance(&rec[*pos], row, name)?;
                }
                Some(l)
            }
        };
        records.push(PatientRecord {
            age_at_implantation: age_v,
            ei_intra,
            ei_1m,
        });
    }
    if records.is_empty() {
        return Err(DataError::EmptyFile);
    }
    Ok(Cohort::new(records))
}

/// Writes the canonical header and one row per record. Numbers use the
/// shortest representation that parses back to the same `f64`.
/// Label columns are written only when every record is labeled.
pub fn serialize_cohort_csv(cohort: &Cohort) -> String {
    let labeled = cohort.is_labeled();
    let mut out = header(labeled).join(",");
    out.push('\n');
    for r in cohort.records() {
        let mut cells = Vec::with_capacity(1 + 2 * CHANNELS);
        cells.push(r.age_at_implantation.to_string());
        cells.extend(r.ei_intra.iter().map(f64::to_string));
        if let (true, Some(l)) = (labeled, r.ei_1m) {
            cells.extend(l.iter().map(f64::to_string));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
