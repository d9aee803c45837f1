//! Random decision forest: bagged CART trees with per-split feature sampling.

use super::tree::{grow, EnsembleParams, TreeSettings};
use super::{ForestHyper, Matrix};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, rng_from};
use rand::Rng;

pub(crate) fn fit_forest<T: Scalar>(
    z: &Matrix<T>,
    y: &[T],
    hyper: &ForestHyper,
    seed: u64,
) -> EnsembleParams<T> {
    let n = z.rows();
    let d = z.cols();
    let subset = hyper
        .feature_subset_size
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let settings = TreeSettings {
        max_depth: hyper.max_depth,
        min_leaf: hyper.min_leaf,
        feature_subset: Some(subset),
    };
    let all: Vec<usize> = (0..n).collect();
    let trees = (0..hyper.trees)
        .map(|t| {
            let mut rng = rng_from(derive_seed(seed, &[t as u64]));
            let rows: Vec<usize> = if hyper.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                all.clone()
            };
            grow(z, y, &rows, settings, &mut rng)
        })
        .collect::<Vec<_>>();
    let w = T::one() / T::of_usize(trees.len());
    EnsembleParams {
        base: T::zero(),
        weights: vec![w; trees.len()],
        trees,
    }
}

/// Average of the tree outputs, clamped to the span of those outputs.
pub(crate) fn predict_forest<T: Scalar>(p: &EnsembleParams<T>, z: &Matrix<T>) -> Vec<T> {
    z.row_iter()
        .map(|row| {
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            let mut acc = p.base;
            for (tree, &w) in p.trees.iter().zip(&p.weights) {
                let v = tree.predict_row(row);
                lo = lo.min(v);
                hi = hi.max(v);
                acc += w * v;
            }
            if p.trees.is_empty() {
                acc
            } else {
                acc.max(lo).min(hi)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Matrix<f64>, Vec<f64>) {
        let rows: Vec<[f64; 2]> = (0..30)
            .map(|i| [i as f64, ((i * 7) % 11) as f64])
            .collect();
        let y = rows.iter().map(|r| r[0] * 0.5 + r[1]).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn single_stump_is_the_mean() {
        let (x, y) = data();
        let h = ForestHyper {
            trees: 1,
            max_depth: 0,
            min_leaf: 2,
            feature_subset_size: None,
            bootstrap: false,
        };
        let p = fit_forest(&x, &y, &h, 3);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        assert!(predict_forest(&p, &x).iter().all(|&v| v == mean));
    }

    #[test]
    fn seeds_change_bootstrap() {
        let (x, y) = data();
        let h = ForestHyper {
            trees: 5,
            max_depth: 3,
            min_leaf: 2,
            feature_subset_size: None,
            bootstrap: true,
        };
        assert_eq!(fit_forest(&x, &y, &h, 1), fit_forest(&x, &y, &h, 1));
        assert_ne!(fit_forest(&x, &y, &h, 1), fit_forest(&x, &y, &h, 2));
    }
}
