//! One-hidden-layer tanh network trained by full-batch gradient descent with
//! momentum.
//!
//! The flat parameter layout used by [`nn_loss_and_gradient`] is
//! `[W1 (hidden x inputs, row-major), b1 (hidden), w2 (hidden), b2]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Matrix, NetHyper, RegressError};
use crate::scalar::Scalar;
use crate::seed::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetShape {
    pub inputs: usize,
    pub hidden: usize,
}

impl NetShape {
    pub fn param_count(self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }
}

/// Fitted network. Targets are centred and scaled before training; the
/// network output is mapped back with `target_mean + target_scale * out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetParams<T> {
    /// hidden x inputs
    pub w1: Matrix<T>,
    pub b1: Vec<T>,
    /// 1 x hidden
    pub w2: Matrix<T>,
    pub b2: Vec<T>,
    pub target_mean: T,
    pub target_scale: T,
}

impl<T: Scalar> NetParams<T> {
    pub fn shape(&self) -> NetShape {
        NetShape {
            inputs: self.w1.cols(),
            hidden: self.w1.rows(),
        }
    }

    pub fn flatten(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.shape().param_count());
        v.extend_from_slice(self.w1.as_slice());
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(self.w2.as_slice());
        v.extend_from_slice(&self.b2);
        v
    }

    fn from_flat(flat: &[T], shape: NetShape, target_mean: T, target_scale: T) -> Self {
        let (h, d) = (shape.hidden, shape.inputs);
        let (w1, rest) = flat.split_at(h * d);
        let (b1, rest) = rest.split_at(h);
        let (w2, b2) = rest.split_at(h);
        Self {
            w1: Matrix::from_vec(h, d, w1.to_vec()).expect("shape"),
            b1: b1.to_vec(),
            w2: Matrix::from_vec(1, h, w2.to_vec()).expect("shape"),
            b2: b2.to_vec(),
            target_mean,
            target_scale,
        }
    }

    pub fn predict(&self, z: &Matrix<T>) -> Vec<T> {
        let flat = self.flatten();
        let shape = self.shape();
        z.row_iter()
            .map(|row| self.target_mean + self.target_scale * forward(&flat, shape, row, None))
            .collect()
    }
}

/// Network output for one row; fills `hidden` with the activations if given.
fn forward<T: Scalar>(p: &[T], shape: NetShape, row: &[T], mut hidden: Option<&mut [T]>) -> T {
    let (h, d) = (shape.hidden, shape.inputs);
    let b1 = &p[h * d..h * d + h];
    let w2 = &p[h * d + h..h * d + 2 * h];
    let b2 = p[h * d + 2 * h];
    let mut out = b2;
    for j in 0..h {
        let w = &p[j * d..(j + 1) * d];
        let a = w.iter().zip(row).fold(b1[j], |acc, (&wk, &xk)| acc + wk * xk);
        let act = a.tanh();
        if let Some(buf) = hidden.as_deref_mut() {
            buf[j] = act;
        }
        out += w2[j] * act;
    }
    out
}

fn check_shapes<T: Scalar>(
    params: &[T],
    shape: NetShape,
    x: &Matrix<T>,
    y: &[T],
) -> Result<(), RegressError> {
    if params.len() != shape.param_count() {
        return Err(RegressError::DimensionMismatch {
            expected: shape.param_count(),
            got: params.len(),
        });
    }
    if x.cols() != shape.inputs {
        return Err(RegressError::DimensionMismatch {
            expected: shape.inputs,
            got: x.cols(),
        });
    }
    if y.len() != x.rows() {
        return Err(RegressError::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Mean squared error of the network on `(x, y)` and its exact gradient
/// with respect to the flat parameter vector.
pub fn nn_loss_and_gradient<T: Scalar>(
    params: &[T],
    shape: NetShape,
    x: &Matrix<T>,
    y: &[T],
) -> Result<(T, Vec<T>), RegressError> {
    check_shapes(params, shape, x, y)?;
    let (h, d) = (shape.hidden, shape.inputs);
    let n = x.rows();
    let mut grad = vec![T::zero(); params.len()];
    if n == 0 {
        return Ok((T::zero(), grad));
    }
    let nf = T::of_usize(n);
    let two = T::one() + T::one();
    let mut act = vec![T::zero(); h];
    let mut loss = T::zero();
    let (gw1, rest) = grad.split_at_mut(h * d);
    let (gb1, rest) = rest.split_at_mut(h);
    let (gw2, gb2) = rest.split_at_mut(h);
    let w2 = &params[h * d + h..h * d + 2 * h];
    for (row, &target) in x.row_iter().zip(y) {
        let out = forward(params, shape, row, Some(&mut act));
        let err = out - target;
        loss += err * err;
        let dout = two * err / nf;
        gb2[0] += dout;
        for j in 0..h {
            gw2[j] += dout * act[j];
            let da = dout * w2[j] * (T::one() - act[j] * act[j]);
            gb1[j] += da;
            for (g, &xk) in gw1[j * d..(j + 1) * d].iter_mut().zip(row) {
                *g += da * xk;
            }
        }
    }
    Ok((loss / nf, grad))
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences with step `h`: `|g - fd| / max(1e-8, |fd|)`.
pub fn check_gradient<T: Scalar>(
    params: &[T],
    shape: NetShape,
    x: &Matrix<T>,
    y: &[T],
    h: T,
) -> Result<T, RegressError> {
    let (_, grad) = nn_loss_and_gradient(params, shape, x, y)?;
    let floor = T::of(1e-8);
    let mut p = params.to_vec();
    let mut worst = T::zero();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let (up, _) = nn_loss_and_gradient(&p, shape, x, y)?;
        p[i] = orig - h;
        let (down, _) = nn_loss_and_gradient(&p, shape, x, y)?;
        p[i] = orig;
        let fd = (up - down) / (h + h);
        let rel = (grad[i] - fd).abs() / fd.abs().max(floor);
        worst = worst.max(rel);
    }
    Ok(worst)
}

pub(crate) fn init_params<T: Scalar>(shape: NetShape, init_scale: f64, seed: u64) -> Vec<T> {
    let (h, d) = (shape.hidden, shape.inputs);
    let mut rng = rng_from(seed);
    let mut p = vec![T::zero(); shape.param_count()];
    let s1 = init_scale / (d as f64).sqrt();
    let s2 = init_scale / (h as f64).sqrt();
    for v in &mut p[..h * d] {
        *v = T::of(rng.random_range(-s1..=s1));
    }
    for v in &mut p[h * d + h..h * d + 2 * h] {
        *v = T::of(rng.random_range(-s2..=s2));
    }
    p
}

pub(crate) fn fit_net<T: Scalar>(
    z: &Matrix<T>,
    y: &[T],
    hyper: &NetHyper,
    seed: u64,
) -> Result<NetParams<T>, RegressError> {
    let shape = NetShape {
        inputs: z.cols(),
        hidden: hyper.hidden_units,
    };
    let n = T::of_usize(y.len());
    let mean = y.iter().copied().sum::<T>() / n;
    let var = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    let scale = if var.sqrt() > T::of(1e-12) {
        var.sqrt()
    } else {
        T::one()
    };
    let target: Vec<T> = y.iter().map(|&v| (v - mean) / scale).collect();

    let mut params = init_params::<T>(shape, hyper.init_scale, seed);
    let mut velocity = vec![T::zero(); params.len()];
    let step = T::of(hyper.step_size);
    let momentum = T::of(hyper.momentum);
    for epoch in 0..hyper.epochs {
        let (loss, grad) = nn_loss_and_gradient(&params, shape, z, &target)?;
        if !loss.is_finite() {
            return Err(RegressError::NonFiniteLoss { epoch });
        }
        for ((p, v), &g) in params.iter_mut().zip(&mut velocity).zip(&grad) {
            *v = momentum * *v - step * g;
            *p += *v;
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(RegressError::NonFiniteLoss { epoch: hyper.epochs });
    }
    Ok(NetParams::from_flat(&params, shape, mean, scale))
}
