use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::scalar::Scalar;

/// Upper edges (kOhm) of the first three absolute-error bins; the fourth
/// bin collects everything from the last edge up.
pub const BAND_EDGES: [f64; 3] = [1.0, 2.0, 3.0];

fn check_lengths<T>(y_hat: &[T], y: &[T]) -> Result<(), PipelineError> {
    if y_hat.len() != y.len() {
        return Err(PipelineError::LengthMismatch {
            predicted: y_hat.len(),
            actual: y.len(),
        });
    }
    if y.is_empty() {
        return Err(PipelineError::Empty);
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse<T: Scalar>(y_hat: &[T], y: &[T]) -> Result<T, PipelineError> {
    check_lengths(y_hat, y)?;
    let sse: T = y_hat.iter().zip(y).map(|(&p, &t)| (p - t) * (p - t)).sum();
    Ok((sse / T::of_usize(y.len())).sqrt())
}

/// Absolute-error histogram over [0,1), [1,2), [2,3), [3,inf) kOhm.
///
/// Percentages are rounded to two decimals, half away from zero, with
/// integer arithmetic on the raw counts. The cumulative columns are rounded
/// from the raw cumulative counts, never summed from rounded cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBands {
    pub counts: [usize; 4],
    pub n_test: usize,
    pub pct: [f64; 4],
    pub cum_0_2: f64,
    pub cum_0_3: f64,
}

/// `100 * count / n` rounded half-up to two decimals.
pub fn percent_2dp(count: usize, n: usize) -> f64 {
    debug_assert!(n > 0);
    // hundredths of a percent: round(10000 * count / n)
    let hundredths = (20_000 * count as u128 + n as u128) / (2 * n as u128);
    hundredths as f64 / 100.0
}

impl ErrorBands {
    pub fn from_counts(counts: [usize; 4]) -> Result<Self, PipelineError> {
        let n: usize = counts.iter().sum();
        if n == 0 {
            return Err(PipelineError::Empty);
        }
        Ok(Self {
            counts,
            n_test: n,
            pct: counts.map(|c| percent_2dp(c, n)),
            cum_0_2: percent_2dp(counts[0] + counts[1], n),
            cum_0_3: percent_2dp(counts[0] + counts[1] + counts[2], n),
        })
    }

    /// Share of errors of at least 3 kOhm.
    pub fn overflow_pct(&self) -> f64 {
        self.pct[3]
    }
}

pub fn band_index<T: Scalar>(abs_err: T) -> usize {
    BAND_EDGES
        .iter()
        .position(|&edge| abs_err < T::of(edge))
        .unwrap_or(BAND_EDGES.len())
}

pub fn error_bands<T: Scalar>(y_hat: &[T], y: &[T]) -> Result<ErrorBands, PipelineError> {
    check_lengths(y_hat, y)?;
    let mut counts = [0usize; 4];
    for (&p, &t) in y_hat.iter().zip(y) {
        counts[band_index((p - t).abs())] += 1;
    }
    ErrorBands::from_counts(counts)
}
