use serde::{Deserialize, Serialize};

use super::csvio::{intra_column, label_column, AGE_COLUMN};
use crate::domain::{published_range, ChannelId, Cohort};

/// A problem at `(row, column)`; rows count from 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub row: usize,
    pub column: String,
    pub message: String,
}

/// Errors block training; warnings are informational.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }
}

fn issue(row: usize, column: String, message: String) -> Issue {
    Issue {
        row,
        column,
        message,
    }
}

/// Checks every record. Non-finite or non-positive values are errors;
/// one-month values outside the reference range of their channel are
/// warnings. Issues come out ordered by row, then column position.
pub fn validate_cohort(cohort: &Cohort) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, r) in cohort.records().iter().enumerate() {
        let row = i + 1;
        let age = r.age_at_implantation;
        if !age.is_finite() || age < 0.0 {
            report.errors.push(issue(
                row,
                AGE_COLUMN.into(),
                format!("age {age} is not a finite non-negative number"),
            ));
        }
        for (c, &v) in r.ei_intra.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                report.errors.push(issue(
                    row,
                    intra_column(c + 1),
                    format!("impedance {v} is not finite and positive"),
                ));
            }
        }
        let Some(labels) = r.ei_1m else { continue };
        for (channel, &v) in ChannelId::all().zip(labels.iter()) {
            let column = label_column(channel.index());
            if !(v.is_finite() && v > 0.0) {
                report.errors.push(issue(
                    row,
                    column,
                    format!("impedance {v} is not finite and positive"),
                ));
                continue;
            }
            let range = published_range(channel);
            if v < range.min.value() {
                report.warnings.push(issue(
                    row,
                    column,
                    format!("{v} below published min {}", range.min.value()),
                ));
            } else if v > range.max.value() {
                report.warnings.push(issue(
                    row,
                    column,
                    format!("{v} above published max {}", range.max.value()),
                ));
            }
        }
    }
    report
}
