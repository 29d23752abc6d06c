//! Python bindings: model fitting and comparison, throughput, grading and
//! the study simulator. Trial logs cross the boundary as CSV text.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fitts::comparison::{self, ComparisonOptions, Criterion};
use fitts::log_io::{read_log_str, write_log_string};
use fitts::models::{self, AmplitudeMode, ModelKind, PredictorRow, TargetGeometry, START_CUBE_DEPTH_M};
use fitts::regression;
use fitts::sim::parabola;
use fitts::sim::study::{generate_study, Preset, StudySpec};
use fitts::sim::Vec3;
use fitts::throughput::{self as tp, ThroughputOptions};
use fitts::trial::{group_by_condition, validate_log, Aggregation};
use fitts::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyIOError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// Ordinary least-squares fit with intercept and diagnostics.
#[pyclass(frozen, get_all, skip_from_py_object, module = "fitts_teleport")]
#[derive(Clone)]
pub struct Fit {
    /// `[intercept, slope1, ...]`
    coefficients: Vec<f64>,
    rss: f64,
    tss: f64,
    r2: f64,
    adj_r2: f64,
    f_stat: f64,
    p_value: f64,
    aic: f64,
    bic: f64,
    n: usize,
    p: usize,
}

impl From<regression::FitResult> for Fit {
    fn from(f: regression::FitResult) -> Self {
        Fit {
            coefficients: f.coefficients,
            rss: f.rss,
            tss: f.tss,
            r2: f.r2,
            adj_r2: f.adj_r2,
            f_stat: f.f_stat,
            p_value: f.p_value,
            aic: f.aic,
            bic: f.bic,
            n: f.n,
            p: f.p,
        }
    }
}

#[pymethods]
impl Fit {
    fn __repr__(&self) -> String {
        format!("Fit(coefficients={:?}, r2={:.5}, n={}, p={})", self.coefficients, self.r2, self.n, self.p)
    }
}

/// Fits `y ~ 1 + x` where `x` is a list of predictor rows.
#[pyfunction]
fn ols_fit(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Fit> {
    if x.len() != y.len() {
        return Err(PyValueError::new_err(format!("{} predictor rows for {} responses", x.len(), y.len())));
    }
    let rows = x
        .into_iter()
        .zip(y)
        .map(|(r, v)| PredictorRow::new(r, v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    regression::ols_fit(&rows).map(Fit::from).map_err(py_err)
}

/// Predictor values of `model` for one grid cell.
#[pyfunction]
#[pyo3(signature = (model, width, distance, height, amplitude_mode = "euclidean"))]
fn predictors(model: &str, width: f64, distance: f64, height: f64, amplitude_mode: &str) -> PyResult<Vec<f64>> {
    let g = TargetGeometry::from_grid(width, distance, height, parse(amplitude_mode)?, START_CUBE_DEPTH_M)
        .map_err(py_err)?;
    models::predictors(parse::<ModelKind>(model)?, &g).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (model, coefficients, width, distance, height, amplitude_mode = "euclidean"))]
fn predict_mt(
    model: &str,
    coefficients: Vec<f64>,
    width: f64,
    distance: f64,
    height: f64,
    amplitude_mode: &str,
) -> PyResult<f64> {
    let g = TargetGeometry::from_grid(width, distance, height, parse(amplitude_mode)?, START_CUBE_DEPTH_M)
        .map_err(py_err)?;
    models::predict_mt(parse::<ModelKind>(model)?, &coefficients, &g).map_err(py_err)
}

/// Evidence grade label for an AIC or BIC difference.
#[pyfunction]
fn grade(criterion: &str, delta: f64) -> PyResult<String> {
    let c = match criterion.to_ascii_lowercase().as_str() {
        "aic" => Criterion::Aic,
        "bic" => Criterion::Bic,
        other => return Err(PyValueError::new_err(format!("unknown criterion '{other}'"))),
    };
    comparison::grade_delta(c, delta).map(|g| g.grade.to_string()).map_err(py_err)
}

/// Simulates a study and returns the trial log as CSV text.
#[pyfunction]
#[pyo3(signature = (seed, participants = 20, preset = "realistic"))]
fn simulate(seed: u64, participants: usize, preset: &str) -> PyResult<String> {
    let spec = StudySpec::preset(parse::<Preset>(preset)?, seed, participants);
    let trials = generate_study(&spec).map_err(py_err)?;
    write_log_string(&trials).map_err(py_err)
}

/// Lists `(line, problem)` for every invalid row of a CSV log.
#[pyfunction]
fn validate(log_csv: &str) -> PyResult<Vec<(usize, String)>> {
    let trials = read_log_str(log_csv).map_err(py_err)?;
    Ok(validate_log(&trials).violations.iter().map(|v| (v.index + 2, v.kind.describe().to_string())).collect())
}

/// Fits all four models on the standard condition groups; one dict per
/// model and group.
#[pyfunction]
#[pyo3(signature = (log_csv, amplitude_mode = "euclidean", aggregation = "means-of-means"))]
fn compare<'py>(
    py: Python<'py>,
    log_csv: &str,
    amplitude_mode: &str,
    aggregation: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let trials = read_log_str(log_csv).map_err(py_err)?;
    let options = ComparisonOptions {
        amplitude_mode: parse::<AmplitudeMode>(amplitude_mode)?,
        aggregation: parse::<Aggregation>(aggregation)?,
        ctd_reference_m: START_CUBE_DEPTH_M,
    };
    let reports = comparison::run_group_suite(&group_by_condition(&trials), &options).map_err(py_err)?;
    comparison::to_records(&reports)
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("group", r.group)?;
            d.set_item("amplitude_mode", r.amplitude_mode.label())?;
            d.set_item("model", r.model.name())?;
            d.set_item("n", r.n)?;
            d.set_item("p", r.p)?;
            d.set_item("intercept", r.intercept)?;
            d.set_item("b1", r.b1)?;
            d.set_item("b2", r.b2)?;
            d.set_item("r2", r.r2)?;
            d.set_item("adj_r2", r.adj_r2)?;
            d.set_item("f_stat", r.f_stat)?;
            d.set_item("p_value", r.p_value)?;
            d.set_item("aic", r.aic)?;
            d.set_item("bic", r.bic)?;
            d.set_item("delta_aic", r.delta_aic)?;
            d.set_item("delta_bic", r.delta_bic)?;
            d.set_item("aic_grade", r.aic_grade.to_string())?;
            d.set_item("bic_grade", r.bic_grade.to_string())?;
            d.set_item("rank_aic", r.rank_aic)?;
            d.set_item("rank_bic", r.rank_bic)?;
            d.set_item("nested_f", r.nested_f)?;
            d.set_item("nested_p", r.nested_p)?;
            d.set_item("equation", r.equation)?;
            Ok(d)
        })
        .collect()
}

/// Effective throughput per technique and posture.
#[pyfunction]
#[pyo3(signature = (log_csv, amplitude_mode = "euclidean", allow_partial = false))]
fn throughput<'py>(
    py: Python<'py>,
    log_csv: &str,
    amplitude_mode: &str,
    allow_partial: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let trials = read_log_str(log_csv).map_err(py_err)?;
    let opts = ThroughputOptions { amplitude_mode: parse(amplitude_mode)?, allow_partial };
    tp::throughput_by_group(&trials, &opts)
        .map_err(py_err)?
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("technique", s.technique.code())?;
            d.set_item("posture", s.posture.name())?;
            d.set_item("amplitude_mode", s.amplitude_mode.label())?;
            d.set_item("tp_bits_per_s", s.tp_bits_per_s)?;
            d.set_item("cells", s.cells.len())?;
            d.set_item("degenerate", s.degenerate.len())?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn effective_width(deviations: Vec<f64>) -> PyResult<f64> {
    tp::effective_width(&deviations).map_err(py_err)
}

/// Landing point of a ballistic pointer on the plane `y = plane_height`,
/// or `None` if the arc never comes down onto it.
#[pyfunction]
#[pyo3(signature = (origin, velocity, gravity = 9.81, plane_height = 0.0))]
fn parabola_landing(
    origin: [f64; 3],
    velocity: [f64; 3],
    gravity: f64,
    plane_height: f64,
) -> Option<([f64; 3], f64)> {
    parabola::parabola_landing(Vec3::from(origin), Vec3::from(velocity), gravity, plane_height)
        .map(|l| (l.point.to_array(), l.flight_time_s))
}

#[pymodule]
fn fitts_teleport(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Fit>()?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_function(wrap_pyfunction!(predictors, m)?)?;
    m.add_function(wrap_pyfunction!(predict_mt, m)?)?;
    m.add_function(wrap_pyfunction!(grade, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(throughput, m)?)?;
    m.add_function(wrap_pyfunction!(effective_width, m)?)?;
    m.add_function(wrap_pyfunction!(parabola_landing, m)?)?;
    Ok(())
}
