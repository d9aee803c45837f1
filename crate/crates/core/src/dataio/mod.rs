//! Cohort ingestion, validation, synthesis and train/test splitting.

mod csvio;
mod split;
mod synth;
mod validate;

use thiserror::Error;

pub use csvio::{parse_cohort_csv, serialize_cohort_csv, AGE_COLUMN};
pub use split::{split_cohort, split_indices, SplitSpec};
pub use synth::{generate_synthetic_cohort, generate_synthetic_cohort_with, ChannelRule, GeneratorSpec};
pub use validate::{validate_cohort, Issue, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("row {row}, column {column}: not a finite number: {value:?}")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column}: value must be positive")]
    NonPositive { row: usize, column: String },
    #[error("row {row}: age must be non-negative")]
    NegativeAge { row: usize },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column {0}")]
    DuplicateColumn(String),
    #[error("input contains no data rows")]
    EmptyFile,
    #[error("malformed csv: {0}")]
    Malformed(String),
    #[error("count must be at least 1")]
    InvalidCount,
    #[error("cohort of {0} records is too small to split")]
    TooSmall(usize),
    #[error("cohort is not labeled")]
    UnlabeledCohort,
    #[error("test fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
}
