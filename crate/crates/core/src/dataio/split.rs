use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::domain::Cohort;
use crate::seed::rng_from;

/// Held-out split: `round(n * test_fraction)` records (at least 1, at most
/// n - 1) go to the test side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.30,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn test_count(&self, n: usize) -> usize {
        ((n as f64 * self.test_fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Ascending `(train, test)` index sets from a seeded permutation of `0..n`.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if n < 2 {
        return Err(DataError::TooSmall(n));
    }
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DataError::InvalidFraction(spec.test_fraction));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from(spec.seed));
    let k = spec.test_count(n);
    let mut test = perm[..k].to_vec();
    let mut train = perm[k..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Partitions a labeled cohort; each side keeps the original record order.
pub fn split_cohort(cohort: &Cohort, spec: &SplitSpec) -> Result<(Cohort, Cohort), DataError> {
    if cohort.len() < 2 {
        return Err(DataError::TooSmall(cohort.len()));
    }
    if !cohort.is_labeled() {
        return Err(DataError::UnlabeledCohort);
    }
    let (train, test) = split_indices(cohort.len(), spec)?;
    let pick = |idx: &[usize]| Cohort::new(idx.iter().map(|&i| cohort.records()[i].clone()).collect());
    Ok((pick(&train), pick(&test)))
}
