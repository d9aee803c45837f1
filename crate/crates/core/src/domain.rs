//! Channel schema, impedance values, patient records and feature assembly.
//!
//! The studied electrode array has twelve channels. Every patient contributes
//! the age at implantation, twelve intraoperative impedances and, for training
//! data, twelve impedances measured one month after surgery.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of electrode channels on the array.
pub const CHANNELS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("channel index {0} outside 1..=12")]
    InvalidChannel(usize),
    #[error("impedance {0} kOhm is not finite and positive")]
    InvalidImpedance(f64),
    #[error("age {0} is not finite and non-negative")]
    InvalidAge(f64),
    #[error("expected {expected} values, got {got}")]
    WrongArity { expected: usize, got: usize },
}

/// Electrode channel, numbered 1 to 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ChannelId(u8);

impl ChannelId {
    pub fn new(index: usize) -> Result<Self, DomainError> {
        if (1..=CHANNELS).contains(&index) {
            Ok(Self(index as u8))
        } else {
            Err(DomainError::InvalidChannel(index))
        }
    }

    /// One-based channel number.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position in per-channel arrays.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    /// Label column name, e.g. `EI_1M_10`.
    pub fn label(self) -> String {
        format!("EI_1M_{}", self.0)
    }

    pub fn all() -> impl Iterator<Item = ChannelId> {
        (1..=CHANNELS as u8).map(ChannelId)
    }
}

impl TryFrom<usize> for ChannelId {
    type Error = DomainError;

    fn try_from(value: usize) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ChannelId> for usize {
    fn from(c: ChannelId) -> usize {
        c.index()
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An impedance in kilo-ohms; always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ImpedanceKOhm(f64);

impl ImpedanceKOhm {
    pub fn new(value: f64) -> Result<Self, DomainError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(DomainError::InvalidImpedance(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ImpedanceKOhm {
    type Error = DomainError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ImpedanceKOhm> for f64 {
    fn from(v: ImpedanceKOhm) -> f64 {
        v.0
    }
}

impl fmt::Display for ImpedanceKOhm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} kOhm", self.0)
    }
}

/// One patient: age at implantation (decimal years), intraoperative
/// impedances and optional one-month impedances, all in channel order.
///
/// Fields are public so records can be built directly; [`PatientRecord::new`]
/// checks the invariants and `validate_cohort` re-checks them before training.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub age_at_implantation: f64,
    pub ei_intra: [f64; CHANNELS],
    pub ei_1m: Option<[f64; CHANNELS]>,
}

impl PatientRecord {
    pub fn new(
        age_at_implantation: f64,
        ei_intra: &[f64],
        ei_1m: Option<&[f64]>,
    ) -> Result<Self, DomainError> {
        if !age_at_implantation.is_finite() || age_at_implantation < 0.0 {
            return Err(DomainError::InvalidAge(age_at_implantation));
        }
        let intra = to_channel_array(ei_intra)?;
        let labels = ei_1m.map(to_channel_array).transpose()?;
        Ok(Self {
            age_at_implantation,
            ei_intra: intra,
            ei_1m: labels,
        })
    }

    pub fn is_labeled(&self) -> bool {
        self.ei_1m.is_some()
    }

    /// One-month impedance for `channel`, if the record is labeled.
    pub fn label(&self, channel: ChannelId) -> Option<f64> {
        self.ei_1m.map(|l| l[channel.offset()])
    }
}

fn to_channel_array(values: &[f64]) -> Result<[f64; CHANNELS], DomainError> {
    if values.len() != CHANNELS {
        return Err(DomainError::WrongArity {
            expected: CHANNELS,
            got: values.len(),
        });
    }
    let mut out = [0.0; CHANNELS];
    for (slot, &v) in out.iter_mut().zip(values) {
        *slot = ImpedanceKOhm::new(v)?.value();
    }
    Ok(out)
}

/// Ordered patient records. `labeled` is true iff every record has labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    records: Vec<PatientRecord>,
    labeled: bool,
}

impl Cohort {
    pub fn new(records: Vec<PatientRecord>) -> Self {
        let labeled = !records.is_empty() && records.iter().all(PatientRecord::is_labeled);
        Self { records, labeled }
    }

    pub fn records(&self) -> &[PatientRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<PatientRecord> {
        self.records
    }

    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Labels of one channel in record order. `None` if any record is unlabeled.
    pub fn labels(&self, channel: ChannelId) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.label(channel)).collect()
    }

    /// Row-major design matrix for `group`, one row per record.
    pub fn design(&self, group: FeatureGroup) -> Vec<Vec<f64>> {
        self.records
            .iter()
            .map(|r| assemble_features(r, group))
            .collect()
    }
}

/// Input feature set: age only, or age plus all intraoperative impedances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    G1,
    G2,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 2] = [FeatureGroup::G1, FeatureGroup::G2];

    pub fn dim(self) -> usize {
        match self {
            FeatureGroup::G1 => 1,
            FeatureGroup::G2 => 1 + CHANNELS,
        }
    }

    /// Group number as printed in result tables.
    pub fn number(self) -> u8 {
        match self {
            FeatureGroup::G1 => 1,
            FeatureGroup::G2 => 2,
        }
    }
}

/// Feature vector: `[age]` for G1, `[age, ei_intra_1, ..., ei_intra_12]` for G2.
pub fn assemble_features(record: &PatientRecord, group: FeatureGroup) -> Vec<f64> {
    let mut out = Vec::with_capacity(group.dim());
    out.push(record.age_at_implantation);
    if group == FeatureGroup::G2 {
        out.extend_from_slice(&record.ei_intra);
    }
    out
}

/// The five regression families, in increasing order of complexity.
/// The derived `Ord` is the tie-breaking order used by model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    LR,
    BLR,
    DFR,
    BDTR,
    NNR,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::LR,
        ModelKind::BLR,
        ModelKind::DFR,
        ModelKind::BDTR,
        ModelKind::NNR,
    ];

    pub fn abbrev(self) -> &'static str {
        match self {
            ModelKind::LR => "LR",
            ModelKind::BLR => "BLR",
            ModelKind::DFR => "DFR",
            ModelKind::BDTR => "BDTR",
            ModelKind::NNR => "NNR",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            ModelKind::LR => "Linear Regression",
            ModelKind::BLR => "Bayesian Linear Regression",
            ModelKind::DFR => "Decision Forest Regression",
            ModelKind::BDTR => "Boosted Decision Tree Regression",
            ModelKind::NNR => "Neural Network Regression",
        }
    }

    pub fn from_abbrev(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.abbrev().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.long_name(), self.abbrev())
    }
}

/// Observed one-month impedance range of one channel in the reference cohort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRange {
    pub channel: ChannelId,
    pub min: ImpedanceKOhm,
    pub max: ImpedanceKOhm,
    pub range: ImpedanceKOhm,
}

impl ChannelRange {
    pub fn contains(&self, value: f64) -> bool {
        value >= self.min.value() && value <= self.max.value()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min.value() + self.max.value())
    }
}

/// (min, max, range) in kOhm for EI_1M_1 ..= EI_1M_12.
const PUBLISHED_RANGES: [(f64, f64, f64); CHANNELS] = [
    (4.48, 16.86, 12.38),
    (5.37, 17.64, 12.27),
    (4.19, 14.57, 10.38),
    (3.38, 17.47, 14.09),
    (2.71, 16.5, 13.79),
    (2.1, 10.55, 8.45),
    (1.97, 8.94, 6.97),
    (2.34, 8.59, 6.25),
    (2.34, 8.3, 5.96),
    (2.12, 8.0, 5.88),
    (2.12, 9.62, 7.5),
    (2.12, 9.31, 7.19),
];

/// Reference one-month impedance bounds for `channel`.
pub fn published_range(channel: ChannelId) -> ChannelRange {
    let (min, max, range) = PUBLISHED_RANGES[channel.offset()];
    ChannelRange {
        channel,
        min: ImpedanceKOhm(min),
        max: ImpedanceKOhm(max),
        range: ImpedanceKOhm(range),
    }
}
