//! Ordinary least squares and conjugate Bayesian linear regression.
//!
//! Both work on standardized features with an appended constant column.
//! The intercept is never penalized: the ridge term and the prior precision
//! only touch the feature block of the normal equations.

use serde::{Deserialize, Serialize};

use super::linalg::{gram_with_intercept, Cholesky};
use super::{BayesHyper, Matrix, RegressError, Standardizer};
use crate::scalar::Scalar;

/// Weights and intercept in standardized feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearParams<T> {
    pub weights: Vec<T>,
    pub intercept: T,
}

impl<T: Scalar> LinearParams<T> {
    pub fn predict(&self, z: &Matrix<T>) -> Vec<T> {
        z.row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.weights)
                    .fold(self.intercept, |acc, (&v, &w)| acc + v * w)
            })
            .collect()
    }

    /// Coefficients on the raw (unstandardized) features: `(weights, intercept)`.
    pub fn raw_coefficients(&self, s: &Standardizer<T>) -> (Vec<T>, T) {
        let weights: Vec<T> = self
            .weights
            .iter()
            .zip(&s.stdevs)
            .map(|(&w, &sd)| w / sd)
            .collect();
        let shift = weights
            .iter()
            .zip(&s.means)
            .fold(T::zero(), |acc, (&w, &m)| acc + w * m);
        (weights, self.intercept - shift)
    }
}

/// Posterior mean plus the (possibly re-estimated) precisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BayesParams<T> {
    #[serde(flatten)]
    pub linear: LinearParams<T>,
    pub alpha: T,
    pub beta: T,
    /// Evidence rounds actually performed.
    pub evidence_rounds: usize,
}

fn split_solution<T: Scalar>(mut sol: Vec<T>) -> LinearParams<T> {
    let intercept = sol.pop().expect("solution includes intercept");
    LinearParams {
        weights: sol,
        intercept,
    }
}

/// Refinement passes after the jittered solve.
const REFINE_ROUNDS: usize = 8;

/// Least squares via the normal equations `ZᵀZ w = Zᵀy`.
///
/// `ridge` is added to the feature block before factoring, so that a nearly
/// singular Gram matrix still factors. Iterative refinement against the
/// unjittered system then removes the bias the jitter introduces: each pass
/// shrinks it by `λ / (e + λ)` along an eigenvalue `e` of `ZᵀZ`.
pub(crate) fn fit_ols<T: Scalar>(
    z: &Matrix<T>,
    y: &[T],
    ridge: T,
) -> Result<LinearParams<T>, RegressError> {
    let d = z.cols();
    let (g, r) = gram_with_intercept(z, y);
    let mut jittered = g.clone();
    for i in 0..d {
        let v = jittered.get(i, i) + ridge;
        jittered.set(i, i, v);
    }
    let chol = Cholesky::factor(&jittered)?;
    let mut sol = chol.solve(&r);
    if ridge > T::zero() {
        let tol = T::epsilon();
        for _ in 0..REFINE_ROUNDS {
            let resid: Vec<T> = (0..=d)
                .map(|i| r[i] - g.row(i).iter().zip(&sol).map(|(&a, &b)| a * b).sum::<T>())
                .collect();
            let step = chol.solve(&resid);
            let step_norm = step.iter().map(|v| v.abs()).fold(T::zero(), T::max);
            let sol_norm = sol.iter().map(|v| v.abs()).fold(T::zero(), T::max);
            sol.iter_mut().zip(&step).for_each(|(s, &c)| *s += c);
            if step_norm <= tol * sol_norm {
                break;
            }
        }
    }
    Ok(split_solution(sol))
}

/// Posterior mean `m = β A⁻¹ Zᵀy`, `A = α·P + β·ZᵀZ`, for fixed precisions.
fn posterior<T: Scalar>(
    g: &Matrix<T>,
    r: &[T],
    d: usize,
    alpha: T,
    beta: T,
) -> Result<(Cholesky<T>, Vec<T>), RegressError> {
    let mut a = g.map(|v| v * beta);
    for i in 0..d {
        let v = a.get(i, i) + alpha;
        a.set(i, i, v);
    }
    let ch = Cholesky::factor(&a)?;
    let rhs: Vec<T> = r.iter().map(|&v| v * beta).collect();
    let m = ch.solve(&rhs);
    Ok((ch, m))
}

const PRECISION_MIN: f64 = 1e-10;
const PRECISION_MAX: f64 = 1e10;
const EVIDENCE_TOL: f64 = 1e-9;

pub(crate) fn fit_bayes<T: Scalar>(
    z: &Matrix<T>,
    y: &[T],
    hyper: &BayesHyper,
) -> Result<BayesParams<T>, RegressError> {
    let n = z.rows();
    let d = z.cols();
    let (g, r) = gram_with_intercept(z, y);
    let mut alpha = T::of(hyper.alpha);
    let mut beta = T::of(hyper.beta);
    let (lo, hi) = (T::of(PRECISION_MIN), T::of(PRECISION_MAX));
    let tol = T::of(EVIDENCE_TOL);
    let mut rounds = 0;

    let (mut ch, mut m) = posterior(&g, &r, d, alpha, beta)?;
    while rounds < hyper.evidence_iters {
        // Effective number of well-determined weights in the penalized block.
        let inv_diag = ch.inverse_diagonal();
        let trace: T = inv_diag[..d].iter().copied().sum();
        let gamma = T::of_usize(d) - alpha * trace;
        let gamma_total = gamma + T::one();
        let norm2: T = m[..d].iter().map(|&w| w * w).sum();
        let fitted = split_solution(m.clone()).predict(z);
        let sse: T = fitted.iter().zip(y).map(|(&p, &t)| (t - p) * (t - p)).sum();
        let dof = T::of_usize(n) - gamma_total;
        if !(norm2 > T::zero()) || !(sse > T::zero()) || !(dof > T::zero()) {
            break;
        }
        let new_alpha = (gamma / norm2).max(lo).min(hi);
        let new_beta = (dof / sse).max(lo).min(hi);
        let moved = ((new_alpha - alpha) / alpha).abs().max(((new_beta - beta) / beta).abs());
        alpha = new_alpha;
        beta = new_beta;
        rounds += 1;
        (ch, m) = posterior(&g, &r, d, alpha, beta)?;
        if moved < tol {
            break;
        }
    }
    Ok(BayesParams {
        linear: split_solution(m),
        alpha,
        beta,
        evidence_rounds: rounds,
    })
}
