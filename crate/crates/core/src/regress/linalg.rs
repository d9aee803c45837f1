//! Small symmetric positive-definite solvers for the linear-family models.

use super::{Matrix, RegressError};
use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub(crate) struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self, RegressError> {
        let n = a.rows();
        debug_assert_eq!(n, a.cols());
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a.get(j, j);
            for k in 0..j {
                let v = l.get(j, k);
                diag -= v * v;
            }
            if !(diag > T::zero()) || !diag.is_finite() {
                return Err(RegressError::SingularSystem);
            }
            let ljj = diag.sqrt();
            l.set(j, j, ljj);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / ljj);
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.l.get(i, k) * z[k];
            }
            z[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.l.get(k, i) * z[k];
            }
            z[i] = s / self.l.get(i, i);
        }
        z
    }

    /// Diagonal of the inverse, column by column.
    pub fn inverse_diagonal(&self) -> Vec<T> {
        let n = self.l.rows();
        let mut e = vec![T::zero(); n];
        (0..n)
            .map(|j| {
                e.iter_mut().for_each(|v| *v = T::zero());
                e[j] = T::one();
                self.solve(&e)[j]
            })
            .collect()
    }
}

/// `ZᵀZ` and `Zᵀy` where `Z = [x, 1]`.
pub(crate) fn gram_with_intercept<T: Scalar>(x: &Matrix<T>, y: &[T]) -> (Matrix<T>, Vec<T>) {
    let p = x.cols() + 1;
    let mut g = Matrix::zeros(p, p);
    let mut r = vec![T::zero(); p];
    let mut z = vec![T::zero(); p];
    for (row, &target) in x.row_iter().zip(y) {
        z[..p - 1].copy_from_slice(row);
        z[p - 1] = T::one();
        for i in 0..p {
            r[i] += z[i] * target;
            for j in 0..=i {
                let v = g.get(i, j) + z[i] * z[j];
                g.set(i, j, v);
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            let v = g.get(i, j);
            g.set(j, i, v);
        }
    }
    (g, r)
}
