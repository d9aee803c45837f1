use serde::{Deserialize, Serialize};

use super::{Matrix, RegressError};
use crate::scalar::Scalar;

/// Floor applied to the standard deviation of constant columns.
pub const STDEV_FLOOR: f64 = 1e-9;

/// Per-column affine map `z = (x - mean) / stdev`, fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub stdevs: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    /// Column means and population standard deviations.
    pub fn fit(x: &Matrix<T>) -> Result<Self, RegressError> {
        let n = x.rows();
        if n == 0 {
            return Err(RegressError::EmptyMatrix);
        }
        let d = x.cols();
        let nf = T::of_usize(n);
        let mut means = vec![T::zero(); d];
        for row in x.row_iter() {
            for (m, &v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= nf);
        let mut vars = vec![T::zero(); d];
        for row in x.row_iter() {
            for ((s, &v), &m) in vars.iter_mut().zip(row).zip(&means) {
                let dv = v - m;
                *s += dv * dv;
            }
        }
        let floor = T::of(STDEV_FLOOR);
        let stdevs = vars
            .into_iter()
            .map(|s| {
                let sd = (s / nf).sqrt();
                if sd > floor {
                    sd
                } else {
                    floor
                }
            })
            .collect();
        Ok(Self { means, stdevs })
    }

    /// Pass-through map of dimension `d`.
    pub fn identity(d: usize) -> Self {
        Self {
            means: vec![T::zero(); d],
            stdevs: vec![T::one(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>, RegressError> {
        if x.cols() != self.dim() {
            return Err(RegressError::DimensionMismatch {
                expected: self.dim(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            for ((v, &m), &s) in out.row_mut(r).iter_mut().zip(&self.means).zip(&self.stdevs) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }
}
