//! Regression algorithms behind a single fit/predict contract.
//!
//! All five model families are generic over the [`Scalar`] type. Features are
//! standardized with a [`Standardizer`] fitted on the training rows only and
//! stored inside the [`TrainedModel`], so prediction takes raw features.

mod boost;
mod forest;
mod linalg;
mod linear;
mod matrix;
pub mod nn;
mod standardize;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use boost::staged_training_mse;
pub use linear::{BayesParams, LinearParams};
pub use matrix::Matrix;
pub use nn::{check_gradient, nn_loss_and_gradient, NetParams, NetShape};
pub use standardize::{Standardizer, STDEV_FLOOR};
pub use tree::{EnsembleParams, Node, RegressionTree};

use crate::domain::ModelKind;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("network loss became non-finite at epoch {epoch}; reduce the step size")]
    NonFiniteLoss { epoch: usize },
    #[error("normal equations are singular; use a positive ridge term")]
    SingularSystem,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),
    #[error("model parameters do not match kind {0:?}")]
    ParamsMismatch(ModelKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHyper {
    /// Ridge term added to the feature block of the normal equations.
    pub ridge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesHyper {
    /// Prior precision on the feature weights.
    pub alpha: f64,
    /// Noise precision.
    pub beta: f64,
    /// Rounds of evidence re-estimation of alpha and beta (0 keeps them fixed).
    pub evidence_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestHyper {
    pub trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features considered per split; `None` means ceil(sqrt(d)).
    pub feature_subset_size: Option<usize>,
    pub bootstrap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostHyper {
    pub trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetHyper {
    pub hidden_units: usize,
    pub epochs: usize,
    pub step_size: f64,
    pub momentum: f64,
    pub init_scale: f64,
}

/// Settings for every model family. `Default` gives the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub lr: LinearHyper,
    pub blr: BayesHyper,
    pub dfr: ForestHyper,
    pub bdtr: BoostHyper,
    pub nnr: NetHyper,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            lr: LinearHyper { ridge: 1e-8 },
            blr: BayesHyper {
                alpha: 1e-2,
                beta: 1.0,
                evidence_iters: 30,
            },
            dfr: ForestHyper {
                trees: 100,
                max_depth: 8,
                min_leaf: 2,
                feature_subset_size: None,
                bootstrap: true,
            },
            bdtr: BoostHyper {
                trees: 200,
                max_depth: 3,
                learning_rate: 0.1,
                min_leaf: 2,
            },
            nnr: NetHyper {
                hidden_units: 16,
                epochs: 2000,
                step_size: 1e-2,
                momentum: 0.9,
                init_scale: 1.0,
            },
        }
    }
}

/// Keys accepted by [`HyperParams::set`].
pub const HYPER_KEYS: &[&str] = &[
    "lr.ridge",
    "blr.alpha",
    "blr.beta",
    "blr.evidence_iters",
    "dfr.trees",
    "dfr.max_depth",
    "dfr.min_leaf",
    "dfr.feature_subset_size",
    "dfr.bootstrap",
    "bdtr.trees",
    "bdtr.max_depth",
    "bdtr.learning_rate",
    "bdtr.min_leaf",
    "nnr.hidden_units",
    "nnr.epochs",
    "nnr.step_size",
    "nnr.momentum",
    "nnr.init_scale",
];

impl HyperParams {
    pub fn validate(&self) -> Result<(), RegressError> {
        let bad = |m: &str| Err(RegressError::InvalidHyper(m.to_string()));
        if !(self.lr.ridge >= 0.0 && self.lr.ridge.is_finite()) {
            return bad("lr.ridge must be finite and >= 0");
        }
        if !(self.blr.alpha > 0.0 && self.blr.alpha.is_finite()) {
            return bad("blr.alpha must be finite and > 0");
        }
        if !(self.blr.beta > 0.0 && self.blr.beta.is_finite()) {
            return bad("blr.beta must be finite and > 0");
        }
        if self.dfr.trees == 0 || self.dfr.min_leaf == 0 {
            return bad("dfr.trees and dfr.min_leaf must be >= 1");
        }
        if self.dfr.feature_subset_size == Some(0) {
            return bad("dfr.feature_subset_size must be >= 1");
        }
        if self.bdtr.trees == 0 || self.bdtr.min_leaf == 0 {
            return bad("bdtr.trees and bdtr.min_leaf must be >= 1");
        }
        if !(self.bdtr.learning_rate > 0.0 && self.bdtr.learning_rate <= 1.0) {
            return bad("bdtr.learning_rate must lie in (0, 1]");
        }
        let n = &self.nnr;
        if n.hidden_units == 0 || n.epochs == 0 {
            return bad("nnr.hidden_units and nnr.epochs must be >= 1");
        }
        if !(n.step_size > 0.0 && n.step_size.is_finite()) {
            return bad("nnr.step_size must be finite and > 0");
        }
        if !(0.0..1.0).contains(&n.momentum) {
            return bad("nnr.momentum must lie in [0, 1)");
        }
        if !(n.init_scale > 0.0 && n.init_scale.is_finite()) {
            return bad("nnr.init_scale must be finite and > 0");
        }
        Ok(())
    }

    /// Applies one `key=value` override, e.g. `("bdtr.trees", "50")`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RegressError> {
        fn num<V: std::str::FromStr>(key: &str, v: &str) -> Result<V, RegressError> {
            v.trim()
                .parse()
                .map_err(|_| RegressError::InvalidHyper(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "lr.ridge" => self.lr.ridge = num(key, value)?,
            "blr.alpha" => self.blr.alpha = num(key, value)?,
            "blr.beta" => self.blr.beta = num(key, value)?,
            "blr.evidence_iters" => self.blr.evidence_iters = num(key, value)?,
            "dfr.trees" => self.dfr.trees = num(key, value)?,
            "dfr.max_depth" => self.dfr.max_depth = num(key, value)?,
            "dfr.min_leaf" => self.dfr.min_leaf = num(key, value)?,
            "dfr.feature_subset_size" => {
                self.dfr.feature_subset_size = match value.trim() {
                    "auto" | "sqrt" => None,
                    v => Some(num(key, v)?),
                }
            }
            "dfr.bootstrap" => self.dfr.bootstrap = num(key, value)?,
            "bdtr.trees" => self.bdtr.trees = num(key, value)?,
            "bdtr.max_depth" => self.bdtr.max_depth = num(key, value)?,
            "bdtr.learning_rate" => self.bdtr.learning_rate = num(key, value)?,
            "bdtr.min_leaf" => self.bdtr.min_leaf = num(key, value)?,
            "nnr.hidden_units" => self.nnr.hidden_units = num(key, value)?,
            "nnr.epochs" => self.nnr.epochs = num(key, value)?,
            "nnr.step_size" => self.nnr.step_size = num(key, value)?,
            "nnr.momentum" => self.nnr.momentum = num(key, value)?,
            "nnr.init_scale" => self.nnr.init_scale = num(key, value)?,
            _ => {
                return Err(RegressError::InvalidHyper(format!(
                    "unknown key {key:?}; expected one of {}",
                    HYPER_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }
}

/// Fitted parameters, one variant per model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "T: Scalar")]
pub enum ModelParams<T> {
    Linear(LinearParams<T>),
    Bayes(BayesParams<T>),
    Forest(EnsembleParams<T>),
    Boosted(EnsembleParams<T>),
    Net(NetParams<T>),
}

/// A fitted regressor: standardizer plus kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainedModel<T> {
    pub kind: ModelKind,
    pub standardizer: Standardizer<T>,
    pub params: ModelParams<T>,
    pub hyper: HyperParams,
    pub seed: u64,
}

impl<T: Scalar> TrainedModel<T> {
    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>, RegressError> {
        predict(self, x)
    }

    pub fn predict_row(&self, row: &[T]) -> Result<T, RegressError> {
        let x = Matrix::from_vec(1, row.len(), row.to_vec())?;
        Ok(self.predict(&x)?[0])
    }
}

fn check_training_data<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<(), RegressError> {
    if y.len() != x.rows() {
        return Err(RegressError::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(RegressError::DegenerateInput(format!(
            "need at least 2 rows, got {}",
            x.rows()
        )));
    }
    if x.cols() == 0 {
        return Err(RegressError::DegenerateInput("no feature columns".into()));
    }
    if y.iter().any(|v| !v.is_finite()) || x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(RegressError::DegenerateInput("non-finite value in training data".into()));
    }
    Ok(())
}

/// Fits one model of `kind`. Every random choice is a function of `seed`.
pub fn fit<T: Scalar>(
    kind: ModelKind,
    x: &Matrix<T>,
    y: &[T],
    hyper: &HyperParams,
    seed: u64,
) -> Result<TrainedModel<T>, RegressError> {
    check_training_data(x, y)?;
    hyper.validate()?;
    let standardizer = Standardizer::fit(x)?;
    let z = standardizer.transform(x)?;
    let params = match kind {
        ModelKind::LR => ModelParams::Linear(linear::fit_ols(&z, y, T::of(hyper.lr.ridge))?),
        ModelKind::BLR => ModelParams::Bayes(linear::fit_bayes(&z, y, &hyper.blr)?),
        ModelKind::DFR => ModelParams::Forest(forest::fit_forest(&z, y, &hyper.dfr, seed)),
        ModelKind::BDTR => ModelParams::Boosted(boost::fit_boosted(&z, y, &hyper.bdtr)),
        ModelKind::NNR => ModelParams::Net(nn::fit_net(&z, y, &hyper.nnr, seed)?),
    };
    Ok(TrainedModel {
        kind,
        standardizer,
        params,
        hyper: hyper.clone(),
        seed,
    })
}

/// Predictions for each row of raw features `x`.
pub fn predict<T: Scalar>(model: &TrainedModel<T>, x: &Matrix<T>) -> Result<Vec<T>, RegressError> {
    let z = model.standardizer.transform(x)?;
    let out = match (&model.kind, &model.params) {
        (ModelKind::LR, ModelParams::Linear(p)) => p.predict(&z),
        (ModelKind::BLR, ModelParams::Bayes(p)) => p.linear.predict(&z),
        (ModelKind::DFR, ModelParams::Forest(p)) => forest::predict_forest(p, &z),
        (ModelKind::BDTR, ModelParams::Boosted(p)) => p.predict(&z),
        (ModelKind::NNR, ModelParams::Net(p)) => p.predict(&z),
        (kind, _) => return Err(RegressError::ParamsMismatch(*kind)),
    };
    Ok(out)
}
