//! Effective-width throughput (mean of means over the amplitude × width grid).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{amplitude_from_grid, AmplitudeMode};
use crate::trial::{sample_sd, ConditionKey, Posture, Technique, Trial};

/// Scales the endpoint SD to the width covering ~96% of a normal scatter.
pub const WE_FACTOR: f64 = 4.133;

/// 4.133 × sample SD of the scalar deviations. Identical deviations give
/// exactly 0; callers treat that as a degenerate cell.
pub fn effective_width(deviations_m: &[f64]) -> Result<f64> {
    if deviations_m.len() < 2 {
        return Err(Error::InsufficientData { required: 2, got: deviations_m.len() });
    }
    if deviations_m.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("endpoint deviations must be finite".into()));
    }
    if deviations_m.iter().all(|&d| d == deviations_m[0]) {
        return Ok(0.0);
    }
    Ok(WE_FACTOR * sample_sd(deviations_m))
}

/// Mean realized amplitude; trials without one fall back to the nominal
/// grid amplitude under `mode`.
pub fn effective_amplitude(trials: &[&Trial], mode: AmplitudeMode) -> Result<f64> {
    if trials.is_empty() {
        return Err(Error::InsufficientData { required: 1, got: 0 });
    }
    let sum: f64 = trials
        .iter()
        .map(|t| {
            t.realized_amplitude_m
                .unwrap_or_else(|| amplitude_from_grid(t.distance_m, t.height_m, mode))
        })
        .sum();
    Ok(sum / trials.len() as f64)
}

pub fn effective_id(ae_m: f64, we_m: f64) -> Result<f64> {
    if !(we_m > 0.0) || !we_m.is_finite() {
        return Err(Error::Domain(format!("effective width must be > 0, got {we_m}")));
    }
    if !(ae_m >= 0.0) || !ae_m.is_finite() {
        return Err(Error::Domain(format!("effective amplitude must be >= 0, got {ae_m}")));
    }
    Ok((ae_m / we_m + 1.0).log2())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputCell {
    pub key: ConditionKey,
    pub ae_m: f64,
    pub we_m: f64,
    pub ide_bits: f64,
    pub mean_mt_s: f64,
    pub tp_bits_per_s: f64,
}

impl ThroughputCell {
    pub fn new(key: ConditionKey, ae_m: f64, we_m: f64, mean_mt_s: f64) -> Result<Self> {
        if !(mean_mt_s > 0.0) || !mean_mt_s.is_finite() {
            return Err(Error::Domain(format!("mean movement time must be > 0, got {mean_mt_s}")));
        }
        let ide_bits = effective_id(ae_m, we_m)?;
        Ok(ThroughputCell { key, ae_m, we_m, ide_bits, mean_mt_s, tp_bits_per_s: ide_bits / mean_mt_s })
    }
}

/// Unweighted mean of the per-cell ID_e / MT.
pub fn throughput_mean_of_means(cells: &[ThroughputCell]) -> Result<f64> {
    if cells.is_empty() {
        return Err(Error::InsufficientData { required: 1, got: 0 });
    }
    Ok(cells.iter().map(|c| c.tp_bits_per_s).sum::<f64>() / cells.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputOptions {
    pub amplitude_mode: AmplitudeMode,
    /// Accept groups that do not cover the full amplitude × width grid.
    pub allow_partial: bool,
}

impl Default for ThroughputOptions {
    fn default() -> Self {
        ThroughputOptions { amplitude_mode: AmplitudeMode::Euclidean, allow_partial: false }
    }
}

/// Throughput of one (technique, posture) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputSummary {
    pub technique: Technique,
    pub posture: Posture,
    pub amplitude_mode: AmplitudeMode,
    pub tp_bits_per_s: f64,
    pub cells: Vec<ThroughputCell>,
    /// Cells dropped because every endpoint deviation was identical.
    pub degenerate: Vec<ConditionKey>,
}

/// Computes one summary per (technique, posture) present in the log.
///
/// The expected grid is every combination of the distinct (D, H) pairs and
/// widths seen anywhere in the log; a group missing one of them is an
/// error unless `allow_partial` is set.
pub fn throughput_by_group(trials: &[Trial], options: &ThroughputOptions) -> Result<Vec<ThroughputSummary>> {
    let mut amplitudes = BTreeSet::new();
    let mut widths = BTreeSet::new();
    let mut groups: BTreeMap<(Technique, Posture), BTreeMap<ConditionKey, Vec<&Trial>>> = BTreeMap::new();
    for t in trials {
        let key = ConditionKey::of(t);
        amplitudes.insert((key.distance_mm, key.height_mm));
        widths.insert(key.width_mm);
        groups.entry((t.technique, t.posture)).or_default().entry(key).or_default().push(t);
    }

    let mut missing = Vec::new();
    for (&(tech, posture), cells) in &groups {
        for &(d, h) in &amplitudes {
            for &w in &widths {
                let key = ConditionKey {
                    technique: Some(tech),
                    posture: Some(posture),
                    width_mm: w,
                    distance_mm: d,
                    height_mm: h,
                };
                if !cells.contains_key(&key) {
                    missing.push(key.to_string());
                }
            }
        }
    }
    if !missing.is_empty() && !options.allow_partial {
        return Err(Error::IncompleteGrid(missing));
    }

    let mut out = Vec::new();
    for ((technique, posture), cells) in groups {
        let mut tp_cells = Vec::new();
        let mut degenerate = Vec::new();
        for (key, cell) in cells {
            let devs: Vec<f64> = cell.iter().map(|t| t.endpoint_deviation_m).collect();
            if devs.len() < 2 {
                if options.allow_partial {
                    degenerate.push(key);
                    continue;
                }
                return Err(Error::InsufficientData { required: 2, got: devs.len() });
            }
            let we = effective_width(&devs)?;
            if we == 0.0 {
                degenerate.push(key);
                continue;
            }
            let ae = effective_amplitude(&cell, options.amplitude_mode)?;
            let mt = cell.iter().map(|t| t.movement_time_s).sum::<f64>() / cell.len() as f64;
            tp_cells.push(ThroughputCell::new(key, ae, we, mt)?);
        }
        if tp_cells.is_empty() {
            return Err(Error::Domain(format!(
                "{}/{}: every cell has zero endpoint scatter",
                technique.code(),
                posture.name()
            )));
        }
        out.push(ThroughputSummary {
            technique,
            posture,
            amplitude_mode: options.amplitude_mode,
            tp_bits_per_s: throughput_mean_of_means(&tp_cells)?,
            cells: tp_cells,
            degenerate,
        });
    }
    Ok(out)
}

/// Per-technique throughput: mean over the postures present.
pub fn technique_throughput(summaries: &[ThroughputSummary]) -> BTreeMap<Technique, f64> {
    let mut acc: BTreeMap<Technique, (f64, usize)> = BTreeMap::new();
    for s in summaries {
        let e = acc.entry(s.technique).or_default();
        e.0 += s.tp_bits_per_s;
        e.1 += 1;
    }
    acc.into_iter().map(|(t, (sum, n))| (t, sum / n as f64)).collect()
}

/// One JSON object per line.
pub fn render_json_lines(summaries: &[ThroughputSummary]) -> Result<String> {
    let mut out = String::new();
    for s in summaries {
        out += &serde_json::to_string(s).map_err(|e| Error::Io(e.to_string()))?;
        out.push('\n');
    }
    Ok(out)
}
