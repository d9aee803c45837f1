use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::domain::{assemble_features, ChannelId, FeatureGroup, ImpedanceKOhm, ModelKind, PatientRecord, CHANNELS};
use crate::regress::TrainedModel;

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// One channel's winning model with its study score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub channel: ChannelId,
    pub group: FeatureGroup,
    /// Held-out RMSE from the study, kOhm.
    pub rmse: f64,
    #[serde(flatten)]
    pub model: TrainedModel<f64>,
}

/// The per-channel winners of a study, enough to predict for new patients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub models: Vec<BundleEntry>,
}

impl ModelBundle {
    /// Checks the version, channel coverage and model input widths.
    pub fn check(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::IncompatibleBundle(m));
        if self.format_version != BUNDLE_FORMAT_VERSION {
            return bad(format!(
                "format_version {} (expected {BUNDLE_FORMAT_VERSION})",
                self.format_version
            ));
        }
        let mut seen = [false; CHANNELS];
        for e in &self.models {
            if std::mem::replace(&mut seen[e.channel.offset()], true) {
                return bad(format!("channel {} appears twice", e.channel));
            }
            if e.model.dim() != e.group.dim() {
                return bad(format!(
                    "channel {}: model expects {} inputs, group {:?} provides {}",
                    e.channel,
                    e.model.dim(),
                    e.group,
                    e.group.dim()
                ));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return bad(format!("no model for channel {}", missing + 1));
        }
        Ok(())
    }

    pub fn entry(&self, channel: ChannelId) -> Option<&BundleEntry> {
        self.models.iter().find(|e| e.channel == channel)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let b: Self = serde_json::from_str(text)
            .map_err(|e| PipelineError::IncompatibleBundle(e.to_string()))?;
        b.check()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPrediction {
    pub channel: ChannelId,
    pub kind: ModelKind,
    pub group: FeatureGroup,
    pub value: ImpedanceKOhm,
    /// Held-out RMSE of the channel's model in the study.
    pub rmse: f64,
}

impl ChannelPrediction {
    /// Uncertainty hint, e.g. `RMSE 0.87 kΩ`.
    pub fn hint(&self) -> String {
        format!("RMSE {:.2} kΩ", self.rmse)
    }
}

/// One-month predictions for all twelve channels of `record`, in channel
/// order. Labels on the record, if any, are ignored.
pub fn predict_one(
    bundle: &ModelBundle,
    record: &PatientRecord,
) -> Result<Vec<ChannelPrediction>, PipelineError> {
    bundle.check()?;
    ChannelId::all()
        .map(|channel| {
            let e = bundle.entry(channel).expect("checked coverage");
            let features = assemble_features(record, e.group);
            let value = e.model.predict_row(&features)?;
            let value = ImpedanceKOhm::new(value)
                .map_err(|_| PipelineError::NonPhysicalPrediction { channel, value })?;
            Ok(ChannelPrediction {
                channel,
                kind: e.model.kind,
                group: e.group,
                value,
                rmse: e.rmse,
            })
        })
        .collect()
}
