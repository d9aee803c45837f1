//! Least-squares gradient boosting of shallow regression trees.

use super::tree::{grow, EnsembleParams, TreeSettings};
use super::{BoostHyper, Matrix};
use crate::scalar::Scalar;
use crate::seed::rng_from;

pub(crate) fn fit_boosted<T: Scalar>(z: &Matrix<T>, y: &[T], hyper: &BoostHyper) -> EnsembleParams<T> {
    let n = z.rows();
    let eta = T::of(hyper.learning_rate);
    let base = y.iter().copied().sum::<T>() / T::of_usize(n);
    let settings = TreeSettings {
        max_depth: hyper.max_depth,
        min_leaf: hyper.min_leaf,
        feature_subset: None,
    };
    let rows: Vec<usize> = (0..n).collect();
    // no sampling, so the rng is never drawn from
    let mut rng = rng_from(0);
    let mut fitted = vec![base; n];
    let mut residual = vec![T::zero(); n];
    let mut trees = Vec::with_capacity(hyper.trees);
    for _ in 0..hyper.trees {
        for ((r, &t), &f) in residual.iter_mut().zip(y).zip(&fitted) {
            *r = t - f;
        }
        let tree = grow(z, &residual, &rows, settings, &mut rng);
        for (f, row) in fitted.iter_mut().zip(z.row_iter()) {
            *f += eta * tree.predict_row(row);
        }
        trees.push(tree);
    }
    EnsembleParams {
        base,
        weights: vec![eta; trees.len()],
        trees,
    }
}

/// Training MSE after 0, 1, ..., T trees of a boosted ensemble.
pub fn staged_training_mse<T: Scalar>(p: &EnsembleParams<T>, z: &Matrix<T>, y: &[T]) -> Vec<T> {
    let n = T::of_usize(y.len());
    let mut fitted = vec![p.base; y.len()];
    let mse = |f: &[T]| f.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>() / n;
    let mut out = vec![mse(&fitted)];
    for (tree, &w) in p.trees.iter().zip(&p.weights) {
        for (f, row) in fitted.iter_mut().zip(z.row_iter()) {
            *f += w * tree.predict_row(row);
        }
        out.push(mse(&fitted));
    }
    out
}
