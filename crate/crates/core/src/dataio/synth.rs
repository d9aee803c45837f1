//! Synthetic cohorts with a known per-channel linear ground truth.
//!
//! For channel `c`:
//!
//! ```text
//! ei_intra[c] ~ Uniform(min_c, max_c)
//! age         ~ Uniform(1, 6) years
//! ei_1m[c]    = clip(slope_c * ei_intra[c] + age_coef_c * age + offset_c + noise, min_c, max_c)
//! noise       ~ Normal(0, noise_sd_c^2)
//! ```
//!
//! with `[min_c, max_c]` the reference one-month range of the channel. The
//! default coefficients are `slope = 0.6`, `age_coef = 0.15 kOhm/year`,
//! `noise_sd = 0.02 * range_c`, and an offset chosen so that the noiseless
//! mean sits at the middle of the range for mid-range inputs and age 3.5.
//! The noiseless mean stays inside `[min_c, max_c]` for every input, so
//! clipping only ever shrinks the noise. All values are rounded to two
//! decimals, matching the resolution of clinical impedance reports.
//! These are modelling conveniences, not clinical estimates.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::domain::{published_range, ChannelId, Cohort, PatientRecord, CHANNELS};
use crate::seed::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRule {
    pub slope: f64,
    pub age_coef: f64,
    pub offset: f64,
    pub noise_sd: f64,
    /// Bounds for intraoperative draws and for clipping the label.
    pub min: f64,
    pub max: f64,
}

impl ChannelRule {
    /// Noiseless one-month value.
    pub fn mean(&self, intra: f64, age: f64) -> f64 {
        self.slope * intra + self.age_coef * age + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub rules: [ChannelRule; CHANNELS],
    pub age_min: f64,
    pub age_max: f64,
    /// Decimal places kept on every generated value.
    pub decimals: u32,
}

const SLOPE: f64 = 0.6;
const AGE_COEF: f64 = 0.15;
const NOISE_FRACTION: f64 = 0.02;
const AGE_MIN: f64 = 1.0;
const AGE_MAX: f64 = 6.0;

impl Default for GeneratorSpec {
    fn default() -> Self {
        let age_mid = 0.5 * (AGE_MIN + AGE_MAX);
        let rules = std::array::from_fn(|i| {
            let range = published_range(ChannelId::new(i + 1).expect("valid channel"));
            let mid = range.midpoint();
            ChannelRule {
                slope: SLOPE,
                age_coef: AGE_COEF,
                offset: mid * (1.0 - SLOPE) - AGE_COEF * age_mid,
                noise_sd: NOISE_FRACTION * range.range.value(),
                min: range.min.value(),
                max: range.max.value(),
            }
        });
        Self {
            rules,
            age_min: AGE_MIN,
            age_max: AGE_MAX,
            decimals: 2,
        }
    }
}

impl GeneratorSpec {
    /// Same rules with a common noise level on every channel.
    pub fn with_noise(mut self, noise_sd: f64) -> Self {
        for r in &mut self.rules {
            r.noise_sd = noise_sd;
        }
        self
    }

    pub fn rule(&self, channel: ChannelId) -> &ChannelRule {
        &self.rules[channel.offset()]
    }
}

fn round_to(v: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (v * scale).round() / scale
}

/// Labeled synthetic cohort of `n` records using the default rules.
pub fn generate_synthetic_cohort(n: usize, seed: u64) -> Result<Cohort, DataError> {
    generate_synthetic_cohort_with(n, seed, &GeneratorSpec::default())
}

pub fn generate_synthetic_cohort_with(
    n: usize,
    seed: u64,
    spec: &GeneratorSpec,
) -> Result<Cohort, DataError> {
    if n == 0 {
        return Err(DataError::InvalidCount);
    }
    let mut rng = rng_from(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let records = (0..n)
        .map(|_| {
            let age = round_to(rng.random_range(spec.age_min..=spec.age_max), spec.decimals);
            let mut intra = [0.0; CHANNELS];
            let mut label = [0.0; CHANNELS];
            for ((rule, x), l) in spec.rules.iter().zip(&mut intra).zip(&mut label) {
                *x = round_to(rng.random_range(rule.min..=rule.max), spec.decimals);
                let eps = rule.noise_sd * std_normal.sample(&mut rng);
                let y = (rule.mean(*x, age) + eps).clamp(rule.min, rule.max);
                *l = round_to(y, spec.decimals);
            }
            PatientRecord {
                age_at_implantation: age,
                ei_intra: intra,
                ei_1m: Some(label),
            }
        })
        .collect();
    Ok(Cohort::new(records))
}
