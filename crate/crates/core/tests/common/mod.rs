//! Reference computations shared by the integration tests and the
//! acceptance runner. Everything here is written against nalgebra or plain
//! loops, independently of the library's own linear algebra.
#![allow(dead_code)]

use impforecast::dataio::{generate_synthetic_cohort, split_cohort, GeneratorSpec};
use impforecast::domain::{ChannelId, ModelKind};
use impforecast::pipeline::{run_study, StudyConfig, StudyOutcome};
use impforecast::regress::{
    check_gradient, fit, staged_training_mse, HyperParams, Matrix, ModelParams, NetShape,
    TrainedModel,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Column `j` ~ Normal(mu_j, s_j) with mu_j in [-3, 3], s_j in [0.5, 3];
/// `y = X w + b + 0.5 * noise`.
pub fn random_problem(r: &mut ChaCha8Rng, n: usize, d: usize) -> (Matrix<f64>, Vec<f64>) {
    let std = Normal::new(0.0, 1.0).unwrap();
    let mu: Vec<f64> = (0..d).map(|_| r.random_range(-3.0..3.0)).collect();
    let sd: Vec<f64> = (0..d).map(|_| r.random_range(0.5..3.0)).collect();
    let w: Vec<f64> = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
    let b: f64 = r.random_range(-5.0..5.0);
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut t = b;
        for j in 0..d {
            let v = mu[j] + sd[j] * std.sample(r);
            t += w[j] * v;
            data.push(v);
        }
        y.push(t + 0.5 * std.sample(r));
    }
    (Matrix::from_vec(n, d, data).unwrap(), y)
}

/// A least-squares problem with n in [10, 100], d in [1, 13] and at least
/// d + 2 rows, so the solution is unique.
pub fn random_ols_problem(r: &mut ChaCha8Rng) -> (Matrix<f64>, Vec<f64>) {
    let d = r.random_range(1..=13usize);
    let n = r.random_range((d + 2).max(10)..=100usize);
    random_problem(r, n, d)
}

fn design(x: &Matrix<f64>) -> DMatrix<f64> {
    let (n, d) = (x.rows(), x.cols());
    DMatrix::from_fn(n, d + 1, |i, j| if j < d { x.get(i, j) } else { 1.0 })
}

/// `[w_1, ..., w_d, b]` from `(AᵀA) θ = Aᵀy`, `A = [X 1]`, by LU.
pub fn normal_equation_solve(x: &Matrix<f64>, y: &[f64]) -> Vec<f64> {
    let a = design(x);
    let yv = DVector::from_column_slice(y);
    let lhs = a.transpose() * &a;
    let rhs = a.transpose() * yv;
    lhs.lu().solve(&rhs).expect("full rank").as_slice().to_vec()
}

/// Column-standardized copy: population standard deviation, no floor.
pub fn standardize(x: &Matrix<f64>) -> Matrix<f64> {
    let (n, d) = (x.rows(), x.cols());
    let mut out = x.clone();
    for j in 0..d {
        let col: Vec<f64> = (0..n).map(|i| x.get(i, j)).collect();
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for i in 0..n {
            out.set(i, j, (col[i] - mean) / sd);
        }
    }
    out
}

/// Posterior mean `m = β (αP + β ZᵀZ)⁻¹ Zᵀy` on `Z = [z 1]`, `P` the identity
/// with a zero in the intercept slot (flat prior on the intercept).
pub fn blr_closed_form(z: &Matrix<f64>, y: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let a = design(z);
    let d = z.cols();
    let mut prior = DMatrix::<f64>::identity(d + 1, d + 1) * alpha;
    prior[(d, d)] = 0.0;
    let lhs = prior + (a.transpose() * &a) * beta;
    let rhs = (a.transpose() * DVector::from_column_slice(y)) * beta;
    lhs.lu().solve(&rhs).expect("positive definite").as_slice().to_vec()
}

/// Norm-wise relative error `‖a - b‖ / ‖b‖`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(f64::MIN_POSITIVE)
}

/// `[raw weights..., intercept]` of a fitted LR or BLR model.
pub fn raw_linear(model: &TrainedModel<f64>) -> Vec<f64> {
    let lin = match &model.params {
        ModelParams::Linear(p) => p,
        ModelParams::Bayes(p) => &p.linear,
        _ => panic!("not a linear model"),
    };
    let (mut w, b) = lin.raw_coefficients(&model.standardizer);
    w.push(b);
    w
}

/// `[standardized weights..., intercept]` of a fitted BLR model.
pub fn std_linear(model: &TrainedModel<f64>) -> Vec<f64> {
    match &model.params {
        ModelParams::Bayes(p) => {
            let mut w = p.linear.weights.clone();
            w.push(p.linear.intercept);
            w
        }
        _ => panic!("not a BLR model"),
    }
}

pub fn fixed_blr(alpha: f64, beta: f64) -> HyperParams {
    let mut h = HyperParams::default();
    h.blr.alpha = alpha;
    h.blr.beta = beta;
    h.blr.evidence_iters = 0;
    h
}

/// Worst LR-vs-oracle relative error over `count` problems.
pub fn ols_worst(seed: u64, count: usize) -> f64 {
    let mut r = rng(seed);
    let hyper = HyperParams::default();
    (0..count)
        .map(|_| {
            let (x, y) = random_ols_problem(&mut r);
            let m = fit(ModelKind::LR, &x, &y, &hyper, 0).unwrap();
            rel_err(&raw_linear(&m), &normal_equation_solve(&x, &y))
        })
        .fold(0.0, f64::max)
}

/// Worst BLR-vs-closed-form error, and worst BLR(α = 1e-12)-vs-OLS error.
pub fn blr_worst(seed: u64, count: usize) -> (f64, f64) {
    let mut r = rng(seed);
    let mut closed = 0.0f64;
    let mut vs_ols = 0.0f64;
    for _ in 0..count {
        let (x, y) = random_ols_problem(&mut r);
        let alpha = 10f64.powf(r.random_range(-3.0..1.0));
        let beta = 10f64.powf(r.random_range(-1.0..1.0));
        let m = fit(ModelKind::BLR, &x, &y, &fixed_blr(alpha, beta), 0).unwrap();
        let oracle = blr_closed_form(&standardize(&x), &y, alpha, beta);
        closed = closed.max(rel_err(&std_linear(&m), &oracle));

        let m = fit(ModelKind::BLR, &x, &y, &fixed_blr(1e-12, 1.0), 0).unwrap();
        vs_ols = vs_ols.max(rel_err(&raw_linear(&m), &normal_equation_solve(&x, &y)));
    }
    (closed, vs_ols)
}

/// A random net with d <= 13, H <= 16, n <= 40 and its data.
pub fn random_net(r: &mut ChaCha8Rng) -> (Vec<f64>, NetShape, Matrix<f64>, Vec<f64>) {
    let std = Normal::new(0.0, 1.0).unwrap();
    let shape = NetShape {
        inputs: r.random_range(1..=13),
        hidden: r.random_range(1..=16),
    };
    let n = r.random_range(1..=40);
    let params: Vec<f64> = (0..shape.param_count()).map(|_| r.random_range(-1.0..1.0)).collect();
    let data: Vec<f64> = (0..n * shape.inputs).map(|_| std.sample(r)).collect();
    let y: Vec<f64> = (0..n).map(|_| std.sample(r)).collect();
    (params, shape, Matrix::from_vec(n, shape.inputs, data).unwrap(), y)
}

/// Worst gradient-check discrepancy over `count` random nets.
pub fn gradient_worst(seed: u64, count: usize, h: f64) -> f64 {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let (p, shape, x, y) = random_net(&mut r);
            check_gradient(&p, shape, &x, &y, h).unwrap()
        })
        .fold(0.0, f64::max)
}

/// Staged training MSE of a boosted model on its own training data.
pub fn boosted_staged_mse(x: &Matrix<f64>, y: &[f64], hyper: &HyperParams) -> Vec<f64> {
    let m = fit(ModelKind::BDTR, x, y, hyper, 0).unwrap();
    let z = m.standardizer.transform(x).unwrap();
    match &m.params {
        ModelParams::Boosted(p) => staged_training_mse(p, &z, y),
        _ => unreachable!(),
    }
}

/// Number of staged-MSE increases over `count` random datasets, T = 200.
pub fn boosting_increases(seed: u64, count: usize) -> usize {
    let mut r = rng(seed);
    let mut hyper = HyperParams::default();
    hyper.bdtr.trees = 200;
    hyper.bdtr.learning_rate = 0.1;
    let mut bad = 0;
    for _ in 0..count {
        let d = r.random_range(1..=13);
        let n = r.random_range(20..=100);
        let (x, mut y) = random_problem(&mut r, n, d);
        // a non-linear target so that trees keep finding splits
        for (t, row) in y.iter_mut().zip(x.row_iter()) {
            *t += 3.0 * (row[0]).sin();
        }
        let staged = boosted_staged_mse(&x, &y, &hyper);
        assert_eq!(staged.len(), 201);
        bad += staged.windows(2).filter(|w| w[1] > w[0]).count();
    }
    bad
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Synthetic study at the default configuration for `seed`.
pub fn synthetic_study(n: usize, seed: u64) -> (impforecast::Cohort, StudyConfig, StudyOutcome) {
    let cohort = generate_synthetic_cohort(n, seed).unwrap();
    let config = StudyConfig::with_seed(seed);
    let out = run_study(&cohort, &config).unwrap();
    (cohort, config, out)
}

/// Per channel: test RMSE of predicting the training mean.
pub fn mean_baseline(cohort: &impforecast::Cohort, config: &StudyConfig) -> Vec<f64> {
    let (train, test) = split_cohort(cohort, &config.split).unwrap();
    ChannelId::all()
        .map(|c| {
            let m = mean(&train.labels(c).unwrap());
            let y = test.labels(c).unwrap();
            (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
        })
        .collect()
}

pub fn noise_sd(channel: ChannelId) -> f64 {
    GeneratorSpec::default().rule(channel).noise_sd
}
