//! CART regression trees with exact squared-error splits.

use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", bound = "T: Scalar")]
pub enum Node<T> {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
    Leaf {
        value: T,
    },
}

/// Binary regression tree stored as a flat node array; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RegressionTree<T> {
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> RegressionTree<T> {
    pub fn predict_row(&self, row: &[T]) -> T {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

/// Weighted sum of trees on top of a base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EnsembleParams<T> {
    pub base: T,
    pub trees: Vec<RegressionTree<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> EnsembleParams<T> {
    pub fn predict_row(&self, row: &[T]) -> T {
        self.trees
            .iter()
            .zip(&self.weights)
            .fold(self.base, |acc, (t, &w)| acc + w * t.predict_row(row))
    }

    pub fn predict(&self, z: &Matrix<T>) -> Vec<T> {
        z.row_iter().map(|r| self.predict_row(r)).collect()
    }

    /// The first `k` trees only.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.trees.len());
        Self {
            base: self.base,
            trees: self.trees[..k].to_vec(),
            weights: self.weights[..k].to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeSettings {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features drawn per split; `None` or `>= d` considers all.
    pub feature_subset: Option<usize>,
}

struct Builder<'a, T, R> {
    x: &'a Matrix<T>,
    y: &'a [T],
    settings: TreeSettings,
    rng: &'a mut R,
    nodes: Vec<Node<T>>,
    scratch: Vec<(T, T)>,
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    gain: T,
}

/// Grows a tree on the rows listed in `rows` (duplicates allowed, as in a
/// bootstrap sample).
pub(crate) fn grow<T: Scalar, R: Rng>(
    x: &Matrix<T>,
    y: &[T],
    rows: &[usize],
    settings: TreeSettings,
    rng: &mut R,
) -> RegressionTree<T> {
    let mut b = Builder {
        x,
        y,
        settings,
        rng,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(rows.len()),
    };
    let mut rows = rows.to_vec();
    b.build(&mut rows, 0);
    RegressionTree { nodes: b.nodes }
}

impl<T: Scalar, R: Rng> Builder<'_, T, R> {
    fn leaf_value(&self, rows: &[usize]) -> T {
        let mut sum = T::zero();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &i in rows {
            let v = self.y[i];
            sum += v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // the mean lies in [lo, hi]; clamp away rounding drift
        (sum / T::of_usize(rows.len())).max(lo).min(hi)
    }

    fn build(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: self.leaf_value(rows),
        });
        if depth >= self.settings.max_depth || rows.len() < 2 * self.settings.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(rows) else {
            return id;
        };
        let (feature, threshold) = (best.feature, best.threshold);
        // stable partition keeps row order deterministic in children
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x.get(i, feature) <= threshold);
        let l = self.build(&mut left, depth + 1);
        let r = self.build(&mut right, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match self.settings.feature_subset {
            Some(k) if k < d => {
                let mut f = index::sample(self.rng, d, k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    /// Largest squared-error reduction; ties go to the lowest feature index,
    /// then the lowest threshold.
    fn best_split(&mut self, rows: &[usize]) -> Option<BestSplit<T>> {
        let n = rows.len();
        let min_leaf = self.settings.min_leaf;
        let total: T = rows.iter().map(|&i| self.y[i]).sum();
        let nf = T::of_usize(n);
        let parent = total * total / nf;
        let mut best: Option<BestSplit<T>> = None;

        for f in self.candidate_features() {
            self.scratch.clear();
            self.scratch
                .extend(rows.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            self.scratch
                .sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
            let mut left_sum = T::zero();
            for k in 0..n - 1 {
                let (xv, yv) = self.scratch[k];
                left_sum += yv;
                let left_n = k + 1;
                if left_n < min_leaf || n - left_n < min_leaf {
                    continue;
                }
                let next = self.scratch[k + 1].0;
                if !(xv < next) {
                    continue;
                }
                let right_sum = total - left_sum;
                let ln = T::of_usize(left_n);
                let rn = T::of_usize(n - left_n);
                let gain = left_sum * left_sum / ln + right_sum * right_sum / rn - parent;
                if gain > T::zero() && best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mid = (xv + next) / (T::one() + T::one());
                    let threshold = if mid >= xv && mid < next { mid } else { xv };
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    fn settings(max_depth: usize) -> TreeSettings {
        TreeSettings {
            max_depth,
            min_leaf: 1,
            feature_subset: None,
        }
    }

    #[test]
    fn depth_zero_is_the_mean() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        let y = [1.0, 2.0, 6.0];
        let t = grow(&x, &y, &[0, 1, 2], settings(0), &mut rng_from(0));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_row(&[100.0]), 3.0);
    }

    #[test]
    fn single_split_separates_step() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0]]).unwrap();
        let y = [0.0, 0.0, 5.0, 5.0];
        let t = grow(&x, &y, &[0, 1, 2, 3], settings(3), &mut rng_from(0));
        assert_eq!(t.depth(), 1);
        assert_eq!(t.leaf_count(), 2);
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 2.5);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(t.predict_row(&[2.5]), 0.0);
        assert_eq!(t.predict_row(&[2.6]), 5.0);
    }

    #[test]
    fn equal_gain_prefers_lowest_feature() {
        // both columns separate y identically
        let x = Matrix::from_rows(&[[1.0, 10.0], [2.0, 20.0], [3.0, 30.0], [4.0, 40.0]]).unwrap();
        let y = [0.0, 0.0, 1.0, 1.0];
        let t = grow(&x, &y, &[0, 1, 2, 3], settings(1), &mut rng_from(0));
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn min_leaf_is_respected() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0]]).unwrap();
        let y = [9.0, 0.0, 0.0, 0.0, 0.0];
        let s = TreeSettings {
            max_depth: 4,
            min_leaf: 2,
            feature_subset: None,
        };
        let t = grow(&x, &y, &[0, 1, 2, 3, 4], s, &mut rng_from(0));
        // the lone outlier cannot be isolated
        assert_ne!(t.predict_row(&[1.0]), 9.0);
    }

    #[test]
    fn constant_target_stays_a_leaf() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0]]).unwrap();
        let t = grow(&x, &[2.0; 4], &[0, 1, 2, 3], settings(5), &mut rng_from(0));
        assert_eq!(t.nodes.len(), 1);
    }
}
