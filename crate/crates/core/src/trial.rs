//! Trial records, log validation and per-condition aggregation.
//!
//! Aggregation cells are keyed by technique, posture, width, distance and
//! height. The viewing angle is kept on each trial but never splits a cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::student_t_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technique {
    /// Right pointer, right-hand gesture.
    RPRG,
    /// Right pointer, left-hand gesture.
    RPLG,
    /// Left pointer, left-hand gesture.
    LPLG,
    /// Left pointer, right-hand gesture.
    LPRG,
    /// Right pointer, dwell confirmation.
    RPDW,
}

impl Technique {
    pub const ALL: [Technique; 5] = [
        Technique::RPRG,
        Technique::RPLG,
        Technique::LPLG,
        Technique::LPRG,
        Technique::RPDW,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Technique::RPRG => "RPRG",
            Technique::RPLG => "RPLG",
            Technique::LPLG => "LPLG",
            Technique::LPRG => "LPRG",
            Technique::RPDW => "RPDW",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Technique::ALL
            .into_iter()
            .find(|t| t.code() == s)
            .ok_or_else(|| Error::Domain(format!("unknown technique '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Posture {
    #[serde(alias = "SITTING", alias = "sitting")]
    Sitting,
    #[serde(alias = "STANDING", alias = "standing")]
    Standing,
}

impl Posture {
    pub const ALL: [Posture; 2] = [Posture::Sitting, Posture::Standing];

    pub fn name(self) -> &'static str {
        match self {
            Posture::Sitting => "Sitting",
            Posture::Standing => "Standing",
        }
    }
}

impl fmt::Display for Posture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Posture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sitting" | "sit" => Ok(Posture::Sitting),
            "standing" | "stand" => Ok(Posture::Standing),
            _ => Err(Error::Domain(format!("unknown posture '{s}'"))),
        }
    }
}

/// One teleportation attempt sequence ending in a selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub participant_id: String,
    pub technique: Technique,
    pub posture: Posture,
    pub block: u32,
    pub trial_index: u32,
    pub width_m: f64,
    pub distance_m: f64,
    pub height_m: f64,
    pub angle_deg: f64,
    pub movement_time_s: f64,
    pub endpoint_deviation_m: f64,
    pub error_attempts: u32,
    pub success: bool,
    /// Teleport displacement actually realized; only known for simulated
    /// trials and not part of the log file.
    #[serde(skip)]
    pub realized_amplitude_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    NonPositiveMovementTime,
    NonPositiveWidth,
    NonPositiveDistance,
    NegativeHeight,
    NegativeDeviation,
    DeviationOutsideTarget,
    NonFinite,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::NonPositiveMovementTime => "non-positive movement time",
            ViolationKind::NonPositiveWidth => "non-positive width",
            ViolationKind::NonPositiveDistance => "non-positive distance",
            ViolationKind::NegativeHeight => "negative height",
            ViolationKind::NegativeDeviation => "negative endpoint deviation",
            ViolationKind::DeviationOutsideTarget => {
                "successful selection with deviation beyond half the target width"
            }
            ViolationKind::NonFinite => "non-finite value",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Position of the offending trial in the input sequence.
    pub index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trial {}: {}", self.index, self.kind.describe())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_offending_index(&self) -> Option<usize> {
        self.violations.iter().map(|v| v.index).min()
    }
}

/// Checks the per-trial invariants; violations are reported, never raised.
pub fn validate_log(trials: &[Trial]) -> ValidationReport {
    let mut violations = Vec::new();
    for (index, t) in trials.iter().enumerate() {
        let mut push = |kind| violations.push(Violation { index, kind });
        let values = [
            t.width_m,
            t.distance_m,
            t.height_m,
            t.angle_deg,
            t.movement_time_s,
            t.endpoint_deviation_m,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            push(ViolationKind::NonFinite);
            continue;
        }
        if t.movement_time_s <= 0.0 {
            push(ViolationKind::NonPositiveMovementTime);
        }
        if t.width_m <= 0.0 {
            push(ViolationKind::NonPositiveWidth);
        }
        if t.distance_m <= 0.0 {
            push(ViolationKind::NonPositiveDistance);
        }
        if t.height_m < 0.0 {
            push(ViolationKind::NegativeHeight);
        }
        if t.endpoint_deviation_m < 0.0 {
            push(ViolationKind::NegativeDeviation);
        }
        if t.success && t.endpoint_deviation_m > t.width_m / 2.0 {
            push(ViolationKind::DeviationOutsideTarget);
        }
    }
    ValidationReport { violations }
}

/// Aggregation cell identity. Lengths are quantized to whole millimetres so
/// float keys compare exactly; `None` marks a factor collapsed away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionKey {
    pub technique: Option<Technique>,
    pub posture: Option<Posture>,
    pub width_mm: i64,
    pub distance_mm: i64,
    pub height_mm: i64,
}

fn to_mm(m: f64) -> i64 {
    (m * 1000.0).round() as i64
}

impl ConditionKey {
    pub fn new(technique: Technique, posture: Posture, width_m: f64, distance_m: f64, height_m: f64) -> Self {
        ConditionKey {
            technique: Some(technique),
            posture: Some(posture),
            width_mm: to_mm(width_m),
            distance_mm: to_mm(distance_m),
            height_mm: to_mm(height_m),
        }
    }

    pub fn of(trial: &Trial) -> Self {
        Self::new(
            trial.technique,
            trial.posture,
            trial.width_m,
            trial.distance_m,
            trial.height_m,
        )
    }

    pub fn width_m(&self) -> f64 {
        self.width_mm as f64 / 1000.0
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_mm as f64 / 1000.0
    }

    pub fn height_m(&self) -> f64 {
        self.height_mm as f64 / 1000.0
    }

    /// The (width, distance, height) part of the key.
    pub fn geometry_mm(&self) -> (i64, i64, i64) {
        (self.width_mm, self.distance_mm, self.height_mm)
    }

    pub fn has(&self, factor: Factor) -> bool {
        match factor {
            Factor::Technique => self.technique.is_some(),
            Factor::Posture => self.posture.is_some(),
        }
    }

    fn without(mut self, factor: Factor) -> Self {
        match factor {
            Factor::Technique => self.technique = None,
            Factor::Posture => self.posture = None,
        }
        self
    }
}

impl fmt::Display for ConditionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tech = self.technique.map_or("*", |t| t.code());
        let posture = self.posture.map_or("*", |p| p.name());
        write!(
            f,
            "{tech}/{posture} W={} D={} H={}",
            self.width_m(),
            self.distance_m(),
            self.height_m()
        )
    }
}

/// Descriptive statistics for one aggregation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub key: ConditionKey,
    pub n_trials: usize,
    /// Number of raw cells merged into this one (1 before any collapse).
    pub n_cells: usize,
    pub mean_mt_s: f64,
    pub sd_mt_s: f64,
    pub mean_deviation_m: f64,
    pub sd_deviation_m: f64,
    pub error_rate: f64,
    pub ci95_mt_s: Option<f64>,
    /// Mean realized teleport displacement when every trial recorded one.
    pub mean_amplitude_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    Technique,
    Posture,
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "technique" => Ok(Factor::Technique),
            "posture" => Ok(Factor::Posture),
            _ => Err(Error::UnknownFactor(s.to_string())),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::Technique => "technique",
            Factor::Posture => "posture",
        })
    }
}

/// How cells are merged when a factor is collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Aggregation {
    /// Unweighted mean of constituent cell means.
    #[default]
    MeansOfMeans,
    /// Trial-weighted mean, equivalent to pooling the raw trials.
    Pooled,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "means-of-means" => Ok(Aggregation::MeansOfMeans),
            "pooled" => Ok(Aggregation::Pooled),
            _ => Err(Error::Config(format!("unknown aggregation '{s}'"))),
        }
    }
}

pub type SummaryMap = BTreeMap<ConditionKey, ConditionSummary>;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn ci95_half_width(sd: f64, n: usize) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let t = student_t_quantile(0.975, (n - 1) as f64).ok()?;
    Some(t * sd / (n as f64).sqrt())
}

/// Groups trials into condition cells. Iteration order of the result is the
/// key order, so the output does not depend on the input order.
pub fn group_by_condition(trials: &[Trial]) -> SummaryMap {
    let mut cells: BTreeMap<ConditionKey, Vec<&Trial>> = BTreeMap::new();
    for t in trials {
        cells.entry(ConditionKey::of(t)).or_default().push(t);
    }
    cells
        .into_iter()
        .map(|(key, members)| (key, summarize(key, &members)))
        .collect()
}

fn summarize(key: ConditionKey, members: &[&Trial]) -> ConditionSummary {
    // keep a stable summation order regardless of input permutation
    let mut mts: Vec<f64> = members.iter().map(|t| t.movement_time_s).collect();
    let mut devs: Vec<f64> = members.iter().map(|t| t.endpoint_deviation_m).collect();
    mts.sort_by(f64::total_cmp);
    devs.sort_by(f64::total_cmp);
    let n = members.len();
    let errors = members.iter().filter(|t| t.error_attempts > 0).count();
    let amplitudes: Option<Vec<f64>> = members.iter().map(|t| t.realized_amplitude_m).collect();
    let mean_amplitude_m = amplitudes.map(|mut a| {
        a.sort_by(f64::total_cmp);
        mean(&a)
    });
    let sd_mt_s = sample_sd(&mts);
    ConditionSummary {
        key,
        n_trials: n,
        n_cells: 1,
        mean_mt_s: mean(&mts),
        sd_mt_s,
        mean_deviation_m: mean(&devs),
        sd_deviation_m: sample_sd(&devs),
        error_rate: errors as f64 / n as f64,
        ci95_mt_s: ci95_half_width(sd_mt_s, n),
        mean_amplitude_m,
    }
}

/// Removes `drop` factors from the cell keys, merging cells that become
/// equal.
///
/// Under [`Aggregation::MeansOfMeans`] every mean field of a merged cell is
/// the unweighted mean of the constituent cell means, and the sd/CI fields
/// describe the spread of those constituent means. Under
/// [`Aggregation::Pooled`] the result is what pooling the raw trials would
/// give (trial-weighted means, pooled sd).
pub fn collapse_over(
    summaries: &SummaryMap,
    drop: &BTreeSet<Factor>,
    aggregation: Aggregation,
) -> Result<SummaryMap> {
    for &factor in drop {
        if summaries.keys().any(|k| !k.has(factor)) {
            return Err(Error::UnknownFactor(factor.to_string()));
        }
    }
    if drop.is_empty() {
        return Ok(summaries.clone());
    }
    let mut groups: BTreeMap<ConditionKey, Vec<&ConditionSummary>> = BTreeMap::new();
    for (key, summary) in summaries {
        let reduced = drop.iter().fold(*key, |k, &f| k.without(f));
        groups.entry(reduced).or_default().push(summary);
    }
    Ok(groups
        .into_iter()
        .map(|(key, parts)| {
            let merged = match aggregation {
                Aggregation::MeansOfMeans => merge_means_of_means(key, &parts),
                Aggregation::Pooled => merge_pooled(key, &parts),
            };
            (key, merged)
        })
        .collect())
}

fn merge_means_of_means(key: ConditionKey, parts: &[&ConditionSummary]) -> ConditionSummary {
    if parts.len() == 1 {
        return ConditionSummary { key, ..parts[0].clone() };
    }
    let mts: Vec<f64> = parts.iter().map(|p| p.mean_mt_s).collect();
    let devs: Vec<f64> = parts.iter().map(|p| p.mean_deviation_m).collect();
    let rates: Vec<f64> = parts.iter().map(|p| p.error_rate).collect();
    let amplitudes: Option<Vec<f64>> = parts.iter().map(|p| p.mean_amplitude_m).collect();
    let sd_mt_s = sample_sd(&mts);
    ConditionSummary {
        key,
        n_trials: parts.iter().map(|p| p.n_trials).sum(),
        n_cells: parts.iter().map(|p| p.n_cells).sum(),
        mean_mt_s: mean(&mts),
        sd_mt_s,
        mean_deviation_m: mean(&devs),
        sd_deviation_m: sample_sd(&devs),
        error_rate: mean(&rates),
        ci95_mt_s: ci95_half_width(sd_mt_s, parts.len()),
        mean_amplitude_m: amplitudes.map(|a| mean(&a)),
    }
}

/// Trial-weighted mean and pooled sample sd from per-part (n, mean, sd).
fn pool(parts: &[(usize, f64, f64)]) -> (f64, f64) {
    let n: usize = parts.iter().map(|p| p.0).sum();
    let grand = parts.iter().map(|&(k, m, _)| k as f64 * m).sum::<f64>() / n as f64;
    if n < 2 {
        return (grand, 0.0);
    }
    let ss: f64 = parts
        .iter()
        .map(|&(k, m, s)| (k as f64 - 1.0) * s * s + k as f64 * (m - grand) * (m - grand))
        .sum();
    (grand, (ss / (n - 1) as f64).sqrt())
}

fn merge_pooled(key: ConditionKey, parts: &[&ConditionSummary]) -> ConditionSummary {
    let n: usize = parts.iter().map(|p| p.n_trials).sum();
    let mt: Vec<_> = parts.iter().map(|p| (p.n_trials, p.mean_mt_s, p.sd_mt_s)).collect();
    let dev: Vec<_> = parts
        .iter()
        .map(|p| (p.n_trials, p.mean_deviation_m, p.sd_deviation_m))
        .collect();
    let (mean_mt_s, sd_mt_s) = pool(&mt);
    let (mean_deviation_m, sd_deviation_m) = pool(&dev);
    let errors: f64 = parts.iter().map(|p| p.error_rate * p.n_trials as f64).sum();
    let amplitude: Option<f64> = parts
        .iter()
        .map(|p| p.mean_amplitude_m.map(|a| a * p.n_trials as f64))
        .sum::<Option<f64>>()
        .map(|s| s / n as f64);
    ConditionSummary {
        key,
        n_trials: n,
        n_cells: parts.iter().map(|p| p.n_cells).sum(),
        mean_mt_s,
        sd_mt_s,
        mean_deviation_m,
        sd_deviation_m,
        error_rate: errors / n as f64,
        ci95_mt_s: ci95_half_width(sd_mt_s, n),
        mean_amplitude_m: amplitude,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn trial(technique: Technique, posture: Posture, w: f64, d: f64, h: f64, mt: f64) -> Trial {
        Trial {
            participant_id: "P01".into(),
            technique,
            posture,
            block: 0,
            trial_index: 0,
            width_m: w,
            distance_m: d,
            height_m: h,
            angle_deg: 0.0,
            movement_time_s: mt,
            endpoint_deviation_m: 0.0,
            error_attempts: 0,
            success: true,
            realized_amplitude_m: None,
        }
    }

    #[test]
    fn negative_movement_time_is_flagged() {
        let mut t = trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 1.0);
        let ok = t.clone();
        t.movement_time_s = -1.0;
        let report = validate_log(&[ok, t]);
        assert_eq!(
            report.violations,
            vec![Violation { index: 1, kind: ViolationKind::NonPositiveMovementTime }]
        );
        assert_eq!(report.violations[0].kind.describe(), "non-positive movement time");
    }

    #[test]
    fn empty_log_is_valid() {
        assert!(validate_log(&[]).is_empty());
    }

    #[test]
    fn success_outside_target_is_flagged() {
        let mut t = trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 1.0);
        t.endpoint_deviation_m = 0.2;
        let report = validate_log(&[t.clone()]);
        assert_eq!(report.violations[0].kind, ViolationKind::DeviationOutsideTarget);
        // boundary is inside
        t.endpoint_deviation_m = 0.1;
        assert!(validate_log(&[t.clone()]).is_empty());
        // a failed trial may land anywhere
        t.endpoint_deviation_m = 0.2;
        t.success = false;
        assert!(validate_log(&[t]).is_empty());
    }

    #[test]
    fn validation_does_not_stop_at_first_problem() {
        let mut t = trial(Technique::RPRG, Posture::Sitting, -0.2, 0.0, -1.0, 0.0);
        t.endpoint_deviation_m = -0.1;
        let kinds: Vec<_> = validate_log(&[t]).violations.into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds.len(), 5);
        let mut nan = trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 1.0);
        nan.angle_deg = f64::NAN;
        assert_eq!(validate_log(&[nan]).violations[0].kind, ViolationKind::NonFinite);
    }

    #[test]
    fn grouping_three_trials() {
        let trials: Vec<_> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&mt| trial(Technique::RPLG, Posture::Standing, 0.2, 3.0, 0.0, mt))
            .collect();
        let map = group_by_condition(&trials);
        assert_eq!(map.len(), 1);
        let s = map.values().next().unwrap();
        assert_eq!(s.n_trials, 3);
        assert_eq!(s.mean_mt_s, 2.0);
        assert_eq!(s.sd_mt_s, 1.0);
        // t(0.975, 2) = 4.302652730 -> 4.302652730 / sqrt(3)
        assert!((s.ci95_mt_s.unwrap() - 2.484137).abs() < 1e-6);
    }

    #[test]
    fn error_rate_counts_trials_with_any_failed_attempt() {
        let trials: Vec<_> = [0, 0, 1, 2]
            .iter()
            .map(|&e| {
                let mut t = trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 1.0);
                t.error_attempts = e;
                t
            })
            .collect();
        let s = group_by_condition(&trials).into_values().next().unwrap();
        assert_eq!(s.error_rate, 0.5);
    }

    #[test]
    fn singleton_cell_has_zero_sd_and_no_ci() {
        let mut t = trial(Technique::RPDW, Posture::Sitting, 1.35, 9.0, 3.0, 2.5);
        t.endpoint_deviation_m = 0.3;
        let s = group_by_condition(&[t]).into_values().next().unwrap();
        assert_eq!(s.mean_mt_s, 2.5);
        assert_eq!(s.mean_deviation_m, 0.3);
        assert_eq!(s.sd_mt_s, 0.0);
        assert_eq!(s.ci95_mt_s, None);
    }

    #[test]
    fn keys_quantize_to_millimetres() {
        let a = ConditionKey::new(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0);
        let b = ConditionKey::new(Technique::RPRG, Posture::Sitting, 0.2000004, 2.9999996, 1e-7);
        assert_eq!(a, b);
        assert_eq!(a.width_m(), 0.2);
    }

    #[test]
    fn collapse_identity_and_midpoint() {
        let trials = vec![
            trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 2.0),
            trial(Technique::RPRG, Posture::Standing, 0.2, 3.0, 0.0, 4.0),
        ];
        let map = group_by_condition(&trials);
        let same = collapse_over(&map, &BTreeSet::new(), Aggregation::MeansOfMeans).unwrap();
        assert_eq!(same, map);

        let drop = BTreeSet::from([Factor::Posture]);
        let merged = collapse_over(&map, &drop, Aggregation::MeansOfMeans).unwrap();
        assert_eq!(merged.len(), 1);
        let s = merged.values().next().unwrap();
        assert_eq!(s.mean_mt_s, 3.0);
        assert_eq!(s.key.posture, None);
        assert_eq!(s.n_cells, 2);

        let again = collapse_over(&merged, &drop, Aggregation::MeansOfMeans);
        assert_eq!(again, Err(Error::UnknownFactor("posture".into())));
        assert!("colour".parse::<Factor>().is_err());
    }

    #[test]
    fn means_of_means_differs_from_pooled_on_unbalanced_cells() {
        let mut trials = vec![trial(Technique::RPRG, Posture::Sitting, 0.2, 3.0, 0.0, 1.0)];
        for _ in 0..3 {
            trials.push(trial(Technique::RPRG, Posture::Standing, 0.2, 3.0, 0.0, 3.0));
        }
        let map = group_by_condition(&trials);
        let drop = BTreeSet::from([Factor::Posture]);
        let mom = collapse_over(&map, &drop, Aggregation::MeansOfMeans).unwrap();
        let pooled = collapse_over(&map, &drop, Aggregation::Pooled).unwrap();
        assert_eq!(mom.values().next().unwrap().mean_mt_s, 2.0);
        let p = pooled.values().next().unwrap();
        assert_eq!(p.mean_mt_s, 2.5);
        // pooled sd equals the sd of the raw trials {1, 3, 3, 3}
        assert!((p.sd_mt_s - sample_sd(&[1.0, 3.0, 3.0, 3.0])).abs() < 1e-12);
    }

    #[test]
    fn full_grid_collapses_to_one_cell_per_geometry() {
        let mut trials = Vec::new();
        let mut mt = 1.0;
        for tech in Technique::ALL {
            for posture in Posture::ALL {
                trials.push(trial(tech, posture, 0.2, 9.0, 3.0, mt));
                mt += 0.5;
            }
        }
        let map = group_by_condition(&trials);
        assert_eq!(map.len(), 10);
        let drop = BTreeSet::from([Factor::Technique, Factor::Posture]);
        let all = collapse_over(&map, &drop, Aggregation::MeansOfMeans).unwrap();
        assert_eq!(all.len(), 1);
        let expected = (0..10).map(|i| 1.0 + 0.5 * i as f64).sum::<f64>() / 10.0;
        assert!((all.values().next().unwrap().mean_mt_s - expected).abs() < 1e-12);
    }
}
