use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bundle::{BundleEntry, ModelBundle, BUNDLE_FORMAT_VERSION};
use super::select::{select_best, CandidateScore, SelectionEntry};
use super::PipelineError;
use crate::dataio::{split_cohort, SplitSpec};
use crate::domain::{ChannelId, Cohort, ModelKind};
use crate::regress::HyperParams;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Smallest cohort a study accepts.
pub const MIN_STUDY_RECORDS: usize = 10;

/// Which data picks the winner. `TestSet` scores candidates on the held-out
/// set itself; `InnerValidation` picks on a split of the training set and
/// only reports the test score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    #[default]
    TestSet,
    InnerValidation,
}

impl std::str::FromStr for SelectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "test_set" | "test" => Ok(Self::TestSet),
            "inner_validation" => Ok(Self::InnerValidation),
            other => Err(format!(
                "unknown selection mode {other:?}; expected test_set or inner_validation"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Master seed; every per-task seed is derived from it.
    pub seed: u64,
    pub split: SplitSpec,
    pub selection: SelectionMode,
    pub hyper: HyperParams,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self::with_seed(42)
    }
}

impl StudyConfig {
    /// Default settings with the split seeded by `seed` as well.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            split: SplitSpec {
                test_fraction: 0.30,
                seed,
            },
            selection: SelectionMode::TestSet,
            hyper: HyperParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub format_version: u32,
    pub config: StudyConfig,
    /// Sorted by channel.
    pub entries: Vec<SelectionEntry>,
    pub histogram: BTreeMap<ModelKind, usize>,
}

impl StudyReport {
    pub fn entry(&self, channel: ChannelId) -> Option<&SelectionEntry> {
        self.entries.iter().find(|e| e.channel == channel)
    }
}

pub struct StudyOutcome {
    pub report: StudyReport,
    pub bundle: ModelBundle,
    /// Grid scores per channel, same order as `report.entries`.
    pub candidates: Vec<Vec<CandidateScore>>,
}

/// Winning-kind counts, with every kind present.
pub fn tally(kinds: impl IntoIterator<Item = ModelKind>) -> BTreeMap<ModelKind, usize> {
    let mut h: BTreeMap<ModelKind, usize> = ModelKind::ALL.into_iter().map(|k| (k, 0)).collect();
    for k in kinds {
        *h.entry(k).or_default() += 1;
    }
    h
}

/// One split, then model selection for each of the twelve channels.
///
/// Work runs on the current rayon pool; results are assembled in channel
/// order, so the output does not depend on the number of threads.
pub fn run_study(cohort: &Cohort, config: &StudyConfig) -> Result<StudyOutcome, PipelineError> {
    if !cohort.is_labeled() {
        return Err(PipelineError::Unlabeled);
    }
    if cohort.len() < MIN_STUDY_RECORDS {
        return Err(PipelineError::TooFewRecords(cohort.len(), MIN_STUDY_RECORDS));
    }
    config.hyper.validate()?;
    let (train, test) = split_cohort(cohort, &config.split)?;
    let channels: Vec<ChannelId> = ChannelId::all().collect();
    let selections = channels
        .par_iter()
        .map(|&c| select_best(c, &train, &test, config))
        .collect::<Result<Vec<_>, _>>()?;

    let mut entries = Vec::with_capacity(selections.len());
    let mut models = Vec::with_capacity(selections.len());
    let mut candidates = Vec::with_capacity(selections.len());
    for s in selections {
        models.push(BundleEntry {
            channel: s.entry.channel,
            group: s.entry.group,
            rmse: s.entry.rmse,
            model: s.model,
        });
        entries.push(s.entry);
        candidates.push(s.candidates);
    }
    let histogram = tally(entries.iter().map(|e| e.kind));
    Ok(StudyOutcome {
        report: StudyReport {
            format_version: REPORT_FORMAT_VERSION,
            config: config.clone(),
            entries,
            histogram,
        },
        bundle: ModelBundle {
            format_version: BUNDLE_FORMAT_VERSION,
            models,
        },
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_winners_tally() {
        use ModelKind::*;
        let winners = [BLR, DFR, LR, BLR, BLR, BLR, BLR, BLR, BLR, NNR, NNR, BDTR];
        let h = tally(winners);
        assert_eq!(h[&BLR], 7);
        assert_eq!(h[&NNR], 2);
        assert_eq!(h[&DFR], 1);
        assert_eq!(h[&BDTR], 1);
        assert_eq!(h[&LR], 1);
        assert_eq!(h.values().sum::<usize>(), 12);
    }

    #[test]
    fn selection_mode_parses() {
        assert_eq!("inner_validation".parse(), Ok(SelectionMode::InnerValidation));
        assert_eq!("test_set".parse(), Ok(SelectionMode::TestSet));
        assert!("cv".parse::<SelectionMode>().is_err());
    }

    #[test]
    fn rejects_small_or_unlabeled() {
        let small = crate::dataio::generate_synthetic_cohort(9, 1).unwrap();
        assert!(matches!(
            run_study(&small, &StudyConfig::default()),
            Err(PipelineError::TooFewRecords(9, 10))
        ));
        let unlabeled = Cohort::new(
            small
                .into_records()
                .into_iter()
                .map(|mut r| {
                    r.ei_1m = None;
                    r
                })
                .collect(),
        );
        assert!(matches!(
            run_study(&unlabeled, &StudyConfig::default()),
            Err(PipelineError::Unlabeled)
        ));
    }
}
