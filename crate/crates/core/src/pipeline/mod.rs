//! Held-out evaluation, per-channel model selection and the end-to-end study.

mod bundle;
mod metrics;
mod select;
mod study;

use thiserror::Error;

pub use bundle::{predict_one, BundleEntry, ChannelPrediction, ModelBundle, BUNDLE_FORMAT_VERSION};
pub use metrics::{band_index, error_bands, percent_2dp, rmse, ErrorBands, BAND_EDGES};
pub use select::{
    candidate_grid, evaluate_candidate, pick_best, select_best, task_seed, CandidateOutcome,
    CandidateScore, ChannelSelection, SelectionEntry,
};
pub use study::{run_study, tally, SelectionMode, StudyConfig, StudyOutcome, StudyReport, REPORT_FORMAT_VERSION};

use crate::dataio::DataError;
use crate::domain::{ChannelId, FeatureGroup, ModelKind};
use crate::regress::RegressError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("length mismatch: {predicted} predictions for {actual} targets")]
    LengthMismatch { predicted: usize, actual: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("cohort is not labeled")]
    Unlabeled,
    #[error("cohort has {0} records; at least {1} are required")]
    TooFewRecords(usize, usize),
    #[error("every candidate failed for channel {channel}: {last}")]
    AllCandidatesFailed { channel: ChannelId, last: String },
    #[error("{kind:?}/{group:?} produced a non-finite held-out score")]
    NonFiniteScore { kind: ModelKind, group: FeatureGroup },
    #[error("incompatible model bundle: {0}")]
    IncompatibleBundle(String),
    #[error("channel {channel}: prediction {value} is not a valid impedance")]
    NonPhysicalPrediction { channel: ChannelId, value: f64 },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Regress(#[from] RegressError),
}
