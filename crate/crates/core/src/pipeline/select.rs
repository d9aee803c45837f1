use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{error_bands, rmse, ErrorBands};
use super::study::{SelectionMode, StudyConfig};
use super::PipelineError;
use crate::dataio::{split_cohort, SplitSpec};
use crate::domain::{ChannelId, Cohort, FeatureGroup, ModelKind};
use crate::regress::{fit, HyperParams, Matrix, TrainedModel};
use crate::seed::derive_seed;

/// Winner for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub channel: ChannelId,
    pub kind: ModelKind,
    pub group: FeatureGroup,
    pub rmse: f64,
    pub bands: ErrorBands,
}

/// Held-out score of one grid point; `rmse` is `None` when the fit failed.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub kind: ModelKind,
    pub group: FeatureGroup,
    pub rmse: Option<f64>,
}

pub struct CandidateOutcome {
    pub rmse: f64,
    pub bands: ErrorBands,
    pub model: TrainedModel<f64>,
}

pub struct ChannelSelection {
    pub entry: SelectionEntry,
    pub model: TrainedModel<f64>,
    /// Every grid point in [`candidate_grid`] order, scored on the
    /// set used for selection.
    pub candidates: Vec<CandidateScore>,
}

/// The ten (kind, group) pairs, simplest first: kind order, then G1 before G2.
pub fn candidate_grid() -> Vec<(ModelKind, FeatureGroup)> {
    ModelKind::ALL
        .into_iter()
        .flat_map(|k| FeatureGroup::ALL.into_iter().map(move |g| (k, g)))
        .collect()
}

/// Seed for one (channel, kind, group) task.
pub fn task_seed(master: u64, channel: ChannelId, kind: ModelKind, group: FeatureGroup) -> u64 {
    derive_seed(
        master,
        &[channel.index() as u64, kind as u64, group.number() as u64],
    )
}

fn design(cohort: &Cohort, group: FeatureGroup) -> Result<Matrix<f64>, PipelineError> {
    let rows = cohort.design(group);
    if rows.is_empty() {
        return Ok(Matrix::empty(group.dim()));
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn labels(cohort: &Cohort, channel: ChannelId) -> Result<Vec<f64>, PipelineError> {
    cohort.labels(channel).ok_or(PipelineError::Unlabeled)
}

/// Fits on `train` only and scores on `test` only.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_candidate(
    kind: ModelKind,
    group: FeatureGroup,
    channel: ChannelId,
    train: &Cohort,
    test: &Cohort,
    hyper: &HyperParams,
    seed: u64,
) -> Result<CandidateOutcome, PipelineError> {
    let x = design(train, group)?;
    let y = labels(train, channel)?;
    let model = fit(kind, &x, &y, hyper, seed)?;
    let y_test = labels(test, channel)?;
    let y_hat = model.predict(&design(test, group)?)?;
    let score = rmse(&y_hat, &y_test)?;
    if !score.is_finite() {
        return Err(PipelineError::NonFiniteScore { kind, group });
    }
    Ok(CandidateOutcome {
        rmse: score,
        bands: error_bands(&y_hat, &y_test)?,
        model,
    })
}

/// Index of the lowest finite score. Scores must be in [`candidate_grid`]
/// order so that a strict comparison resolves ties toward the simpler kind,
/// then toward G1.
pub fn pick_best(scores: &[CandidateScore]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(r) = s.rmse.filter(|r| r.is_finite()) {
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((i, r));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn score_grid(
    channel: ChannelId,
    train: &Cohort,
    eval: &Cohort,
    config: &StudyConfig,
) -> (Vec<CandidateScore>, Vec<Result<CandidateOutcome, PipelineError>>) {
    let outcomes: Vec<_> = candidate_grid()
        .into_par_iter()
        .map(|(kind, group)| {
            let seed = task_seed(config.seed, channel, kind, group);
            evaluate_candidate(kind, group, channel, train, eval, &config.hyper, seed)
        })
        .collect();
    let scores = candidate_grid()
        .into_iter()
        .zip(&outcomes)
        .map(|((kind, group), o)| CandidateScore {
            kind,
            group,
            rmse: o.as_ref().ok().map(|o| o.rmse),
        })
        .collect();
    (scores, outcomes)
}

fn all_failed(channel: ChannelId, outcomes: &[Result<CandidateOutcome, PipelineError>]) -> PipelineError {
    let last = outcomes
        .iter()
        .rev()
        .find_map(|o| o.as_ref().err())
        .map(ToString::to_string)
        .unwrap_or_default();
    PipelineError::AllCandidatesFailed { channel, last }
}

/// Evaluates the whole grid for one channel and keeps the best candidate.
pub fn select_best(
    channel: ChannelId,
    train: &Cohort,
    test: &Cohort,
    config: &StudyConfig,
) -> Result<ChannelSelection, PipelineError> {
    match config.selection {
        SelectionMode::TestSet => {
            let (candidates, mut outcomes) = score_grid(channel, train, test, config);
            let best = pick_best(&candidates).ok_or_else(|| all_failed(channel, &outcomes))?;
            let (kind, group) = (candidates[best].kind, candidates[best].group);
            let won = outcomes.swap_remove(best).expect("best candidate succeeded");
            Ok(ChannelSelection {
                entry: SelectionEntry {
                    channel,
                    kind,
                    group,
                    rmse: won.rmse,
                    bands: won.bands,
                },
                model: won.model,
                candidates,
            })
        }
        SelectionMode::InnerValidation => {
            let inner = SplitSpec {
                test_fraction: config.split.test_fraction,
                seed: derive_seed(config.seed, &[u64::from_le_bytes(*b"innerval")]),
            };
            let (fit_part, val_part) = split_cohort(train, &inner)?;
            let (candidates, outcomes) = score_grid(channel, &fit_part, &val_part, config);
            let best = pick_best(&candidates).ok_or_else(|| all_failed(channel, &outcomes))?;
            let (kind, group) = (candidates[best].kind, candidates[best].group);
            let seed = task_seed(config.seed, channel, kind, group);
            let won = evaluate_candidate(kind, group, channel, train, test, &config.hyper, seed)?;
            Ok(ChannelSelection {
                entry: SelectionEntry {
                    channel,
                    kind,
                    group,
                    rmse: won.rmse,
                    bands: won.bands,
                },
                model: won.model,
                candidates,
            })
        }
    }
}
