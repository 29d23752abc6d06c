//! TOML simulation config.
//!
//! ```toml
//! preset = "realistic"        # or "model-exact"
//! seed = 42                   # required
//! participants = 20
//!
//! [ground_truth]
//! model = "Proposed"
//! coefficients = [-2.46, 1.21, -3.0]
//! amplitude_mode = "euclidean"
//!
//! [noise]
//! mt_sd_s = 0.3
//! endpoint_sd_fraction = 0.28
//!
//! [technique_offsets_s]       # any subset; unlisted techniques keep the preset value
//! RPDW = 0.25
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use super::study::{Preset, StudySpec};
use crate::error::{Error, Result};
use crate::trial::Technique;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    seed: Option<i64>,
    participants: Option<i64>,
    ground_truth: Option<RawGroundTruth>,
    noise: Option<RawNoise>,
    technique_offsets_s: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroundTruth {
    model: Option<String>,
    coefficients: Option<Vec<f64>>,
    amplitude_mode: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    mt_sd_s: Option<f64>,
    endpoint_sd_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub preset: Preset,
    pub spec: StudySpec,
}

/// Parses and validates a config. An explicit `seed_override` stands in for
/// a missing or different `seed` key.
pub fn parse_sim_config(text: &str, seed_override: Option<u64>) -> Result<SimConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let preset: Preset = raw.preset.as_deref().unwrap_or("realistic").parse()?;
    let seed = match (seed_override, raw.seed) {
        (Some(s), _) => s,
        (None, Some(s)) if s >= 0 => s as u64,
        (None, Some(s)) => return Err(Error::Config(format!("seed must be non-negative, got {s}"))),
        (None, None) => return Err(Error::Config("missing required field 'seed'".into())),
    };
    let participants = match raw.participants {
        None => 20,
        Some(n) if n >= 1 => n as usize,
        Some(n) => return Err(Error::Config(format!("participants must be >= 1, got {n}"))),
    };
    let mut spec = StudySpec::preset(preset, seed, participants);
    if let Some(gt) = raw.ground_truth {
        if let Some(m) = gt.model {
            spec.ground_truth.model = m.parse()?;
        }
        if let Some(c) = gt.coefficients {
            spec.ground_truth.coefficients = c;
        }
        if let Some(a) = gt.amplitude_mode {
            spec.ground_truth.amplitude_mode = a.parse()?;
        }
        let want = spec.ground_truth.model.predictor_count() + 1;
        if spec.ground_truth.coefficients.len() != want {
            return Err(Error::Config(format!(
                "ground_truth.coefficients: {} needs {want} values, got {}",
                spec.ground_truth.model,
                spec.ground_truth.coefficients.len()
            )));
        }
    }
    if let Some(n) = raw.noise {
        if let Some(v) = n.mt_sd_s {
            spec.noise.mt_sd_s = v;
        }
        if let Some(v) = n.endpoint_sd_fraction {
            spec.noise.endpoint_sd_fraction = v;
        }
    }
    for (code, offset) in raw.technique_offsets_s.unwrap_or_default() {
        let t: Technique = code
            .parse()
            .map_err(|_| Error::Config(format!("technique_offsets_s: unknown technique '{code}'")))?;
        spec.technique_offsets_s[t.index()] = offset;
    }
    spec.validate()?;
    Ok(SimConfig { preset, spec })
}
