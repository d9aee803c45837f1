//! Per-channel forecasting of one-month cochlear implant electrode
//! impedances from intra-operative measurements and age at implantation.
//!
//! The regression code is generic over the float type (see [`scalar::Scalar`]);
//! the aliases below fix it to `f64`, which is what the study pipeline uses.

pub mod cli;
pub mod dataio;
pub mod domain;
pub mod pipeline;
pub mod regress;
pub mod report;
pub mod scalar;
pub mod seed;

pub type Matrix = regress::Matrix<f64>;
pub type Model = regress::TrainedModel<f64>;
pub type Params = regress::ModelParams<f64>;
pub type Standardizer = regress::Standardizer<f64>;

pub use domain::{ChannelId, Cohort, FeatureGroup, ImpedanceKOhm, ModelKind, PatientRecord};
pub use pipeline::{run_study, ModelBundle, StudyConfig, StudyReport};
