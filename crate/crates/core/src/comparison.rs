//! Fits the four Fitts' law variants on a condition group, ranks them by
//! AIC/BIC and grades the gaps.
//!
//! AIC gaps are graded after Burnham and Anderson, BIC gaps after Raftery.
//! Boundary values (2, 4, 6, 7 and 10 for BIC) belong to the interval on
//! their higher-delta side; the unnamed 7–10 AIC range is `Indeterminate`
//! and includes 10.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{predictors, AmplitudeMode, ModelKind, PredictorRow, TargetGeometry, START_CUBE_DEPTH_M};
use crate::regression::{ols_fit, partial_f, FitResult};
use crate::trial::{collapse_over, Aggregation, ConditionSummary, Factor, Posture, SummaryMap, Technique};

/// Smallest group the comparison accepts: two-predictor models need n ≥ 4
/// for a defined adjusted R², one more for a non-degenerate F.
pub const MIN_CELLS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grade {
    Substantial,
    Strong,
    Less,
    Indeterminate,
    None,
    Positive,
    VeryStrong,
}

impl Grade {
    pub fn label(self) -> &'static str {
        match self {
            Grade::Substantial => "Substantial",
            Grade::Strong => "Strong",
            Grade::Less => "Less",
            Grade::Indeterminate => "Indeterminate",
            Grade::None => "None",
            Grade::Positive => "Positive",
            Grade::VeryStrong => "VeryStrong",
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Grade::Substantial,
            Grade::Strong,
            Grade::Less,
            Grade::Indeterminate,
            Grade::None,
            Grade::Positive,
            Grade::VeryStrong,
        ]
        .into_iter()
        .find(|g| g.label() == s)
        .ok_or_else(|| Error::Domain(format!("unknown grade '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceGrade {
    pub criterion: Criterion,
    pub delta: f64,
    pub grade: Grade,
}

impl EvidenceGrade {
    /// Position on a common scale of support for the graded model relative
    /// to the best one: 0 is the most support. Non-decreasing in `delta`
    /// for both criteria.
    pub fn support_rank(&self) -> u8 {
        match (self.criterion, self.grade) {
            (Criterion::Aic, Grade::Substantial) => 0,
            (Criterion::Aic, Grade::Strong) => 1,
            (Criterion::Aic, Grade::Less) => 2,
            (Criterion::Aic, Grade::Indeterminate) => 3,
            (Criterion::Aic, _) => 4,
            (Criterion::Bic, Grade::None) => 0,
            (Criterion::Bic, Grade::Positive) => 1,
            (Criterion::Bic, Grade::Strong) => 2,
            (Criterion::Bic, _) => 3,
        }
    }
}

pub fn grade_delta(criterion: Criterion, delta: f64) -> Result<EvidenceGrade> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::Domain(format!("criterion delta must be >= 0, got {delta}")));
    }
    let grade = match criterion {
        Criterion::Aic => {
            if delta < 2.0 {
                Grade::Substantial
            } else if delta < 4.0 {
                Grade::Strong
            } else if delta < 7.0 {
                Grade::Less
            } else if delta <= 10.0 {
                Grade::Indeterminate
            } else {
                Grade::None
            }
        }
        Criterion::Bic => {
            if delta < 2.0 {
                Grade::None
            } else if delta < 6.0 {
                Grade::Positive
            } else if delta < 10.0 {
                Grade::Strong
            } else {
                Grade::VeryStrong
            }
        }
    };
    Ok(EvidenceGrade { criterion, delta, grade })
}

/// Gap to the smallest value. Equal values (including two −∞ sentinels)
/// give 0; a finite value behind a −∞ winner gives +∞.
fn delta_to_min(value: f64, min: f64) -> f64 {
    if value == min {
        0.0
    } else {
        value - min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub kind: ModelKind,
    pub fit: FitResult,
    pub delta_aic: f64,
    pub delta_bic: f64,
    pub aic_grade: Grade,
    pub bic_grade: Grade,
    /// 1-based.
    pub rank_aic: usize,
    pub rank_bic: usize,
    /// Nested F-test against the model this one extends, when there is one.
    pub nested_f: Option<(f64, f64)>,
}

impl ModelEntry {
    pub fn equation(&self) -> String {
        render_equation(self.kind, &self.fit.coefficients, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub group_label: String,
    pub amplitude_mode: AmplitudeMode,
    /// One entry per model, in [`ModelKind::ALL`] order.
    pub entries: Vec<ModelEntry>,
}

impl ComparisonReport {
    pub fn entry(&self, kind: ModelKind) -> &ModelEntry {
        self.entries.iter().find(|e| e.kind == kind).expect("every model is fitted")
    }

    pub fn ranking(&self, criterion: Criterion) -> Vec<ModelKind> {
        let mut order: Vec<&ModelEntry> = self.entries.iter().collect();
        order.sort_by_key(|e| match criterion {
            Criterion::Aic => e.rank_aic,
            Criterion::Bic => e.rank_bic,
        });
        order.into_iter().map(|e| e.kind).collect()
    }

    pub fn best(&self, criterion: Criterion) -> ModelKind {
        self.ranking(criterion)[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonOptions {
    pub amplitude_mode: AmplitudeMode,
    pub aggregation: Aggregation,
    pub ctd_reference_m: f64,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions {
            amplitude_mode: AmplitudeMode::Euclidean,
            aggregation: Aggregation::MeansOfMeans,
            ctd_reference_m: START_CUBE_DEPTH_M,
        }
    }
}

pub fn rows_for_model(
    kind: ModelKind,
    cells: &[&ConditionSummary],
    options: &ComparisonOptions,
) -> Result<Vec<PredictorRow>> {
    cells
        .iter()
        .map(|c| {
            let g = TargetGeometry::from_grid(
                c.key.width_m(),
                c.key.distance_m(),
                c.key.height_m(),
                options.amplitude_mode,
                options.ctd_reference_m,
            )?;
            PredictorRow::new(predictors(kind, &g)?, c.mean_mt_s)
        })
        .collect()
}

fn rank(values: &[(ModelKind, f64)]) -> BTreeMap<ModelKind, usize> {
    let mut order: Vec<_> = values.to_vec();
    // stable sort keeps enum order on exact ties
    order.sort_by(|a, b| a.1.total_cmp(&b.1));
    order.into_iter().enumerate().map(|(i, (k, _))| (k, i + 1)).collect()
}

/// Fits all four models to the same cells and ranks them.
pub fn compare_models(
    cells: &[&ConditionSummary],
    group_label: &str,
    options: &ComparisonOptions,
) -> Result<ComparisonReport> {
    if cells.len() < MIN_CELLS {
        return Err(Error::InsufficientData { required: MIN_CELLS, got: cells.len() });
    }
    let mut fits = BTreeMap::new();
    for kind in ModelKind::ALL {
        let rows = rows_for_model(kind, cells, options)?;
        fits.insert(kind, ols_fit(&rows)?);
    }
    let aics: Vec<_> = fits.iter().map(|(&k, f)| (k, f.aic)).collect();
    let bics: Vec<_> = fits.iter().map(|(&k, f)| (k, f.bic)).collect();
    let min_aic = aics.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
    let min_bic = bics.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    let rank_aic = rank(&aics);
    let rank_bic = rank(&bics);

    let mut entries = Vec::with_capacity(4);
    for kind in ModelKind::ALL {
        let fit = fits[&kind].clone();
        let delta_aic = delta_to_min(fit.aic, min_aic);
        let delta_bic = delta_to_min(fit.bic, min_bic);
        let nested_f = match kind.nested_base() {
            Some(base) => Some(partial_f(&fit, &fits[&base])?),
            None => None,
        };
        entries.push(ModelEntry {
            kind,
            delta_aic,
            delta_bic,
            aic_grade: grade_delta(Criterion::Aic, delta_aic)?.grade,
            bic_grade: grade_delta(Criterion::Bic, delta_bic)?.grade,
            rank_aic: rank_aic[&kind],
            rank_bic: rank_bic[&kind],
            nested_f,
            fit,
        });
    }
    Ok(ComparisonReport {
        group_label: group_label.to_string(),
        amplitude_mode: options.amplitude_mode,
        entries,
    })
}

/// Condition groups in report order.
pub const COMPARISON_GROUPS: [&str; 8] = ["RPRG", "LPLG", "RPLG", "LPRG", "RPDW", "All Sit", "All Stand", "All"];

/// Selects and collapses the raw cells that make up one named group.
pub fn group_cells(summaries: &SummaryMap, label: &str, aggregation: Aggregation) -> Result<SummaryMap> {
    let (technique, posture): (Option<Technique>, Option<Posture>) = match label {
        "All" => (None, None),
        "All Sit" => (None, Some(Posture::Sitting)),
        "All Stand" => (None, Some(Posture::Standing)),
        code => (Some(code.parse()?), None),
    };
    let selected: SummaryMap = summaries
        .iter()
        .filter(|(k, _)| technique.is_none_or(|t| k.technique == Some(t)))
        .filter(|(k, _)| posture.is_none_or(|p| k.posture == Some(p)))
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    let mut drop = BTreeSet::new();
    if selected.keys().any(|k| k.technique.is_some()) {
        drop.insert(Factor::Technique);
    }
    if selected.keys().any(|k| k.posture.is_some()) {
        drop.insert(Factor::Posture);
    }
    collapse_over(&selected, &drop, aggregation)
}

/// The eight-group comparison for one amplitude mode. Expects uncollapsed
/// per-condition summaries.
pub fn run_group_suite(summaries: &SummaryMap, options: &ComparisonOptions) -> Result<Vec<ComparisonReport>> {
    let mut missing = Vec::new();
    for t in Technique::ALL {
        if !summaries.keys().any(|k| k.technique == Some(t)) {
            missing.push(t.code().to_string());
        }
    }
    for (p, label) in [(Posture::Sitting, "All Sit"), (Posture::Standing, "All Stand")] {
        if !summaries.keys().any(|k| k.posture == Some(p)) {
            missing.push(label.to_string());
        }
    }
    if summaries.is_empty() {
        missing.push("All".to_string());
    }
    if !missing.is_empty() {
        // keep table order
        missing.sort_by_key(|m| COMPARISON_GROUPS.iter().position(|g| g == m));
        return Err(Error::MissingGroups(missing));
    }
    COMPARISON_GROUPS
        .iter()
        .map(|label| {
            let cells = group_cells(summaries, label, options.aggregation)?;
            let refs: Vec<&ConditionSummary> = cells.values().collect();
            compare_models(&refs, label, options)
        })
        .collect()
}

fn signed(value: f64, decimals: usize) -> String {
    if value < 0.0 {
        format!("- {:.*}", decimals, -value)
    } else {
        format!("+ {:.*}", decimals, value)
    }
}

/// Equation in the sign convention of the original model definitions: the
/// two-part width term and the proposed depth/altitude term are subtracted.
pub fn render_equation(kind: ModelKind, coefficients: &[f64], decimals: usize) -> String {
    let a = coefficients[0];
    let b = &coefficients[1..];
    let d = decimals;
    match kind {
        ModelKind::Standard => format!("MT = {:.*}*ID {}", d, b[0], signed(a, d)),
        ModelKind::TwoPart => format!(
            "MT = {:.*}*log2(A+W) {}*log2(W) {}",
            d,
            b[0],
            signed(-b[1], d),
            signed(a, d)
        ),
        ModelKind::Vergence => format!("MT = {:.*}*ID {}*CTD {}", d, b[0], signed(b[1], d), signed(a, d)),
        ModelKind::Proposed => format!(
            "MT = {:.*}*ID {}*log2(W/max(D,H)+1) {}",
            d,
            b[0],
            signed(-b[1], d),
            signed(a, d)
        ),
    }
}

/// Compact `MT=b1*A+b2*B+a` form, where A and B are the first and second
/// stored predictors (B already carries the sign folded into it).
pub fn render_ab_equation(coefficients: &[f64], decimals: usize) -> String {
    let d = decimals;
    let fmt_term = |c: f64, name: &str, first: bool| {
        if first {
            format!("{c:.d$}*{name}")
        } else if c < 0.0 {
            format!("-{:.d$}*{name}", -c)
        } else {
            format!("+{c:.d$}*{name}")
        }
    };
    let mut s = String::from("MT=");
    s += &fmt_term(coefficients[1], "A", true);
    if coefficients.len() > 2 {
        s += &fmt_term(coefficients[2], "B", false);
    }
    let a = coefficients[0];
    if a < 0.0 {
        s += &format!("-{:.d$}", -a);
    } else {
        s += &format!("+{a:.d$}");
    }
    s
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "p<0.001".into()
    } else if p < 0.01 {
        "p<0.01".into()
    } else if p < 0.05 {
        "p<0.05".into()
    } else {
        format!("{p:.3}")
    }
}

fn format_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.2}")
    }
}

/// Human-readable table: models as row blocks, groups within each block.
pub fn render_table(reports: &[ComparisonReport]) -> String {
    let header = [
        "Model", "Condition", "Mode", "F-stat", "p-val", "R2", "Adj R2", "AIC", "BIC", "dAIC", "dBIC", "AIC grade",
        "BIC grade", "Equation",
    ];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for kind in ModelKind::ALL {
        for report in reports {
            let e = report.entry(kind);
            rows.push(vec![
                kind.name().to_string(),
                report.group_label.clone(),
                report.amplitude_mode.label().to_string(),
                format_num(e.fit.f_stat),
                format_p(e.fit.p_value),
                format!("{:.2}", e.fit.r2),
                format!("{:.2}", e.fit.adj_r2),
                format_num(e.fit.aic),
                format_num(e.fit.bic),
                format_num(e.delta_aic),
                format_num(e.delta_bic),
                e.aic_grade.to_string(),
                e.bic_grade.to_string(),
                e.equation(),
            ]);
        }
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join(" | ").trim_end());
    };
    line(header.to_vec(), &mut out);
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    for r in &rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out.push_str(
        "\nAIC = n*ln(RSS/n) + 2k, BIC = n*ln(RSS/n) + k*ln(n), k = predictors + 1; only differences are meaningful.\n\
         Grade boundaries belong to the higher-delta interval (AIC 7..=10 is Indeterminate).\n\
         Equations use the subtracted-term convention of the model definitions.\n",
    );
    out
}

/// Flat machine-readable record, one per model and group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub group: String,
    pub amplitude_mode: AmplitudeMode,
    pub model: ModelKind,
    pub n: usize,
    pub p: usize,
    pub intercept: f64,
    pub b1: f64,
    pub b2: Option<f64>,
    pub rss: f64,
    pub tss: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub p_value: f64,
    pub aic: f64,
    pub bic: f64,
    pub delta_aic: f64,
    pub delta_bic: f64,
    pub aic_grade: Grade,
    pub bic_grade: Grade,
    pub rank_aic: usize,
    pub rank_bic: usize,
    pub nested_f: Option<f64>,
    pub nested_p: Option<f64>,
    pub equation: String,
    pub equation_ab: String,
}

pub fn to_records(reports: &[ComparisonReport]) -> Vec<ComparisonRecord> {
    reports
        .iter()
        .flat_map(|r| {
            r.entries.iter().map(move |e| ComparisonRecord {
                group: r.group_label.clone(),
                amplitude_mode: r.amplitude_mode,
                model: e.kind,
                n: e.fit.n,
                p: e.fit.p,
                intercept: e.fit.coefficients[0],
                b1: e.fit.coefficients[1],
                b2: e.fit.coefficients.get(2).copied(),
                rss: e.fit.rss,
                tss: e.fit.tss,
                r2: e.fit.r2,
                adj_r2: e.fit.adj_r2,
                f_stat: e.fit.f_stat,
                p_value: e.fit.p_value,
                aic: e.fit.aic,
                bic: e.fit.bic,
                delta_aic: e.delta_aic,
                delta_bic: e.delta_bic,
                aic_grade: e.aic_grade,
                bic_grade: e.bic_grade,
                rank_aic: e.rank_aic,
                rank_bic: e.rank_bic,
                nested_f: e.nested_f.map(|t| t.0),
                nested_p: e.nested_f.map(|t| t.1),
                equation: render_equation(e.kind, &e.fit.coefficients, 4),
                equation_ab: render_ab_equation(&e.fit.coefficients, 4),
            })
        })
        .collect()
}

/// CSV with a header row; floats in shortest round-trip form, `inf`/`-inf`
/// for the saturated-fit sentinels.
pub fn render_records(reports: &[ComparisonReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in to_records(reports) {
        w.serialize(rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_records(text: &str) -> Result<Vec<ComparisonReport>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut reports: Vec<ComparisonReport> = Vec::new();
    for (i, rec) in r.deserialize::<ComparisonRecord>().enumerate() {
        let rec = rec.map_err(|e| Error::MalformedLog { line: i + 2, message: e.to_string() })?;
        let mut coefficients = vec![rec.intercept, rec.b1];
        coefficients.extend(rec.b2);
        let entry = ModelEntry {
            kind: rec.model,
            fit: FitResult {
                coefficients,
                rss: rec.rss,
                tss: rec.tss,
                r2: rec.r2,
                adj_r2: rec.adj_r2,
                f_stat: rec.f_stat,
                p_value: rec.p_value,
                aic: rec.aic,
                bic: rec.bic,
                n: rec.n,
                p: rec.p,
            },
            delta_aic: rec.delta_aic,
            delta_bic: rec.delta_bic,
            aic_grade: rec.aic_grade,
            bic_grade: rec.bic_grade,
            rank_aic: rec.rank_aic,
            rank_bic: rec.rank_bic,
            nested_f: rec.nested_f.zip(rec.nested_p),
        };
        match reports.last_mut() {
            Some(last) if last.group_label == rec.group && last.amplitude_mode == rec.amplitude_mode => {
                last.entries.push(entry)
            }
            _ => reports.push(ComparisonReport {
                group_label: rec.group,
                amplitude_mode: rec.amplitude_mode,
                entries: vec![entry],
            }),
        }
    }
    Ok(reports)
}
