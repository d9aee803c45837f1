mod common;

use common::*;
use impforecast::domain::ModelKind;
use impforecast::regress::{
    check_gradient, fit, nn_loss_and_gradient, HyperParams, Matrix, ModelParams, NetShape,
};
use rand::Rng;

#[test]
fn lr_matches_normal_equations() {
    let worst = ols_worst(11, 50);
    eprintln!("lr worst relative error {worst:.3e}");
    assert!(worst < 1e-8);
}

#[test]
fn lr_interpolates_affine_target() {
    let x = Matrix::from_rows(&(0..10).map(|i| [i as f64]).collect::<Vec<_>>()).unwrap();
    let y: Vec<f64> = (0..10).map(|i| 3.0 * i as f64 + 1.0).collect();
    let m = fit(ModelKind::LR, &x, &y, &HyperParams::default(), 0).unwrap();
    for (p, t) in m.predict(&x).unwrap().iter().zip(&y) {
        assert!((p - t).abs() < 1e-8);
    }
}

#[test]
fn blr_matches_closed_form_and_ols_limit() {
    let (closed, vs_ols) = blr_worst(12, 50);
    eprintln!("blr closed-form {closed:.3e}, vs ols {vs_ols:.3e}");
    assert!(closed < 1e-8);
    assert!(vs_ols < 1e-6);
}

#[test]
fn blr_evidence_keeps_precisions_positive() {
    let mut r = rng(5);
    let (x, y) = random_problem(&mut r, 40, 4);
    let m = fit(ModelKind::BLR, &x, &y, &HyperParams::default(), 0).unwrap();
    let ModelParams::Bayes(p) = &m.params else { unreachable!() };
    assert!(p.alpha > 0.0 && p.beta > 0.0);
    // noise sd is 0.5, so the re-estimated noise precision should be near 4
    assert!((1.0..16.0).contains(&p.beta), "beta {}", p.beta);
}

#[test]
fn nn_gradient_matches_finite_differences() {
    let worst = gradient_worst(13, 20, 1e-5);
    eprintln!("gradient worst relative error {worst:.3e}");
    assert!(worst < 1e-4);
}

#[test]
fn gradient_check_is_insensitive_to_step() {
    let mut r = rng(14);
    for _ in 0..5 {
        let (p, shape, x, y) = random_net(&mut r);
        let coarse = check_gradient(&p, shape, &x, &y, 1e-2).unwrap();
        let fine = check_gradient(&p, shape, &x, &y, 1e-5).unwrap();
        // central differences are O(h^2): the finer step must be closer
        assert!(fine < 1e-4);
        assert!(fine < coarse, "fine {fine}, coarse {coarse}");
    }
}

#[test]
fn gradient_check_near_linear_regime() {
    // tiny first-layer weights keep tanh in its linear range
    let mut r = rng(15);
    let (mut p, shape, x, y) = random_net(&mut r);
    let w1 = shape.inputs * shape.hidden;
    for v in &mut p[..w1] {
        *v *= 1e-3;
    }
    assert!(check_gradient(&p, shape, &x, &y, 1e-5).unwrap() < 1e-4);
}

#[test]
fn gradient_of_output_bias_is_twice_mean_residual() {
    let mut r = rng(16);
    let (p, shape, x, y) = random_net(&mut r);
    let (_, g) = nn_loss_and_gradient(&p, shape, &x, &y).unwrap();
    // with zero output weights the net predicts b2 everywhere
    let mut q = p.clone();
    let h = shape.hidden;
    let w2 = shape.inputs * h + h;
    q[w2..w2 + h].iter_mut().for_each(|v| *v = 0.0);
    let b2 = q[w2 + h];
    let (loss, gq) = nn_loss_and_gradient(&q, shape, &x, &y).unwrap();
    let expected = 2.0 * y.iter().map(|t| b2 - t).sum::<f64>() / y.len() as f64;
    assert!((gq[w2 + h] - expected).abs() < 1e-12);
    let mse = y.iter().map(|t| (b2 - t).powi(2)).sum::<f64>() / y.len() as f64;
    assert!((loss - mse).abs() < 1e-12);
    assert_eq!(g.len(), NetShape { inputs: shape.inputs, hidden: h }.param_count());
}

#[test]
fn boosting_training_error_never_rises() {
    assert_eq!(boosting_increases(17, 10), 0);
}

#[test]
fn boosting_prefixes_equal_refits() {
    let mut r = rng(18);
    let (x, y) = random_problem(&mut r, 60, 3);
    let mut hyper = HyperParams::default();
    hyper.bdtr.trees = 50;
    let full = boosted_staged_mse(&x, &y, &hyper);
    for t in [1, 2, 7, 25, 50] {
        hyper.bdtr.trees = t;
        let short = boosted_staged_mse(&x, &y, &hyper);
        assert_eq!(short.last(), full.get(t), "T = {t}");
    }
}

#[test]
fn single_stump_forest_predicts_the_mean() {
    let mut r = rng(19);
    let (x, y) = random_problem(&mut r, 37, 5);
    let mut hyper = HyperParams::default();
    hyper.dfr.trees = 1;
    hyper.dfr.max_depth = 0;
    hyper.dfr.bootstrap = false;
    let m = fit(ModelKind::DFR, &x, &y, &hyper, 3).unwrap();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    for p in m.predict(&x).unwrap() {
        assert_eq!(p, mean);
    }
}

#[test]
fn forest_stays_within_training_range() {
    let mut r = rng(20);
    for _ in 0..5 {
        let (x, y) = random_problem(&mut r, 50, 4);
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = fit(ModelKind::DFR, &x, &y, &HyperParams::default(), r.random()).unwrap();
        let probe: Vec<f64> = (0..200 * 4).map(|_| r.random_range(-50.0..50.0)).collect();
        let probe = Matrix::from_vec(200, 4, probe).unwrap();
        for p in m.predict(&probe).unwrap().into_iter().chain(m.predict(&x).unwrap()) {
            assert!(p >= lo && p <= hi, "{p} outside [{lo}, {hi}]");
        }
    }
}

#[test]
fn trees_ignore_affine_feature_rescaling() {
    let mut r = rng(21);
    let (x, y) = random_problem(&mut r, 45, 3);
    let scaled = x.map(|v| 7.5 * v - 120.0);
    for kind in [ModelKind::DFR, ModelKind::BDTR] {
        let a = fit(kind, &x, &y, &HyperParams::default(), 9).unwrap();
        let b = fit(kind, &scaled, &y, &HyperParams::default(), 9).unwrap();
        assert_eq!(a.predict(&x).unwrap(), b.predict(&scaled).unwrap(), "{kind:?}");
    }
}

#[test]
fn fits_are_deterministic_in_the_seed() {
    let mut r = rng(22);
    let (x, y) = random_problem(&mut r, 30, 4);
    let mut hyper = HyperParams::default();
    hyper.nnr.epochs = 200;
    for kind in ModelKind::ALL {
        let a = fit(kind, &x, &y, &hyper, 77).unwrap();
        let b = fit(kind, &x, &y, &hyper, 77).unwrap();
        assert_eq!(a, b, "{kind:?}");
    }
}

#[test]
fn every_kind_learns_a_linear_signal() {
    let mut r = rng(23);
    let (x, y) = random_problem(&mut r, 80, 2);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let base = y.iter().map(|t| (t - mean).powi(2)).sum::<f64>();
    for kind in ModelKind::ALL {
        let m = fit(kind, &x, &y, &HyperParams::default(), 1).unwrap();
        let sse: f64 = m.predict(&x).unwrap().iter().zip(&y).map(|(p, t)| (p - t).powi(2)).sum();
        assert!(sse < 0.5 * base, "{kind:?}: {sse} vs {base}");
    }
}

#[test]
fn lr_survives_duplicated_column() {
    let mut r = rng(24);
    let (x, y) = random_problem(&mut r, 30, 2);
    let rows: Vec<[f64; 3]> = x.row_iter().map(|v| [v[0], v[1], v[0]]).collect();
    let dup = Matrix::from_rows(&rows).unwrap();
    let a = fit(ModelKind::LR, &x, &y, &HyperParams::default(), 0).unwrap();
    let b = fit(ModelKind::LR, &dup, &y, &HyperParams::default(), 0).unwrap();
    for (p, q) in a.predict(&x).unwrap().iter().zip(b.predict(&dup).unwrap()) {
        assert!((p - q).abs() < 1e-6, "{p} vs {q}");
    }
    let mut exact = HyperParams::default();
    exact.lr.ridge = 0.0;
    assert!(fit(ModelKind::LR, &dup, &y, &exact, 0).is_err());
}
