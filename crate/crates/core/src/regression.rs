//! Ordinary least squares with the usual diagnostics: R², adjusted R²,
//! overall and nested F-tests, AIC and BIC.
//!
//! AIC and BIC use the Gaussian log-likelihood with additive constants
//! dropped, `n·ln(RSS/n) + penalty`, and count `k = p + 1` parameters (the
//! intercept, not the error variance). Only differences between models are
//! meaningful under this convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::PredictorRow;
use crate::special::f_sf;

/// Residual sums below this fraction of `Σy²` are float round-off of an
/// exact fit and are reported as 0.
const SATURATION_RTOL: f64 = 1e-24;
/// A column whose component orthogonal to the earlier columns is smaller
/// than this fraction of its own norm is treated as dependent.
const RANK_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// `[intercept, slope₁, …, slopeₚ]`.
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub tss: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub p_value: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub p: usize,
}

impl FitResult {
    /// Number of estimated parameters, `p + 1`.
    pub fn k(&self) -> usize {
        self.p + 1
    }

    /// The residual sum is zero: AIC/BIC are −∞ sentinels.
    pub fn saturated(&self) -> bool {
        self.rss == 0.0
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }
}

fn column_name(j: usize) -> String {
    if j == 0 {
        "intercept".to_string()
    } else {
        format!("x{j}")
    }
}

/// Fits `MT = b₀ + Σ bⱼ·xⱼ` by least squares.
///
/// The design matrix (with a leading intercept column) is orthogonalised by
/// Gram-Schmidt with one full re-orthogonalisation pass; the columns are
/// processed in a fixed order, so repeated fits are bit-identical.
pub fn ols_fit(rows: &[PredictorRow]) -> Result<FitResult> {
    let n = rows.len();
    let p = rows.first().map_or(0, |r| r.predictors.len());
    if n < p + 2 {
        return Err(Error::InsufficientData { required: p + 2, got: n });
    }
    if let Some(bad) = rows.iter().find(|r| r.predictors.len() != p) {
        return Err(Error::LengthMismatch { expected: p, got: bad.predictors.len() });
    }
    if rows
        .iter()
        .any(|r| !r.response_mt_s.is_finite() || r.predictors.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::Domain("non-finite value in regression input".into()));
    }

    let cols = p + 1;
    let columns: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            rows.iter()
                .map(|r| if j == 0 { 1.0 } else { r.predictors[j - 1] })
                .collect()
        })
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.response_mt_s).collect();

    // thin QR: q holds orthonormal columns, r is upper triangular (row-major)
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut r = vec![vec![0.0; cols]; cols];
    let mut dependent = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let norm0 = norm(col);
        let mut v = col.clone();
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let proj = dot(qi, &v);
                r[i][j] += proj;
                axpy(-proj, qi, &mut v);
            }
        }
        let rest = norm(&v);
        if norm0 == 0.0 || rest <= RANK_RTOL * norm0 {
            dependent.push(column_name(j));
            // keep q square with r so later columns still index correctly
            q.push(vec![0.0; n]);
            continue;
        }
        r[j][j] = rest;
        v.iter_mut().for_each(|x| *x /= rest);
        q.push(v);
    }
    if !dependent.is_empty() {
        return Err(Error::CollinearPredictors { columns: dependent });
    }

    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, &y)).collect();
    let mut beta = vec![0.0; cols];
    for i in (0..cols).rev() {
        let tail: f64 = ((i + 1)..cols).map(|j| r[i][j] * beta[j]).sum();
        beta[i] = (qty[i] - tail) / r[i][i];
    }

    let mut rss: f64 = rows
        .iter()
        .zip(&y)
        .map(|(row, yi)| {
            let fitted = beta[0] + beta[1..].iter().zip(&row.predictors).map(|(b, x)| b * x).sum::<f64>();
            (yi - fitted) * (yi - fitted)
        })
        .sum();
    let y_sq: f64 = y.iter().map(|v| v * v).sum();
    if rss <= SATURATION_RTOL * y_sq {
        rss = 0.0;
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r2 = if rss == 0.0 || tss == 0.0 { 1.0 } else { (1.0 - rss / tss).max(0.0) };
    let adj = adj_r2(r2, n, p)?;
    let (f_stat, p_value) = if p == 0 { (0.0, 1.0) } else { overall_f(r2, n, p)? };
    let k = p + 1;
    Ok(FitResult {
        coefficients: beta,
        rss,
        tss,
        r2,
        adj_r2: adj,
        f_stat,
        p_value,
        aic: aic(rss, n, k)?,
        bic: bic(rss, n, k)?,
        n,
        p,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub fn adj_r2(r2: f64, n: usize, p: usize) -> Result<f64> {
    if n <= p + 1 {
        return Err(Error::Domain(format!(
            "adjusted R² undefined for n={n}, p={p} (need n > p + 1)"
        )));
    }
    if r2 == 1.0 || p == 0 {
        return Ok(r2);
    }
    Ok(1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p - 1) as f64)
}

/// Overall regression F-test. A perfect fit returns `(+∞, 0)`.
pub fn overall_f(r2: f64, n: usize, p: usize) -> Result<(f64, f64)> {
    if p == 0 || n <= p + 1 {
        return Err(Error::Domain(format!("F-test undefined for n={n}, p={p}")));
    }
    if !(0.0..=1.0).contains(&r2) {
        return Err(Error::Domain(format!("R² out of range: {r2}")));
    }
    if r2 == 1.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    let d1 = p as f64;
    let d2 = (n - p - 1) as f64;
    let f = (r2 / d1) / ((1.0 - r2) / d2);
    Ok((f, f_sf(f, d1, d2)?))
}

fn check_criterion_args(rss: f64, n: usize, k: usize) -> Result<()> {
    if !(rss >= 0.0) || n == 0 || k == 0 {
        return Err(Error::Domain(format!(
            "information criterion needs rss >= 0, n >= 1, k >= 1 (rss={rss}, n={n}, k={k})"
        )));
    }
    Ok(())
}

fn log_likelihood_term(rss: f64, n: usize) -> f64 {
    n as f64 * (rss / n as f64).ln()
}

/// `n·ln(rss/n) + 2k`; a zero residual sum gives −∞.
pub fn aic(rss: f64, n: usize, k: usize) -> Result<f64> {
    check_criterion_args(rss, n, k)?;
    Ok(log_likelihood_term(rss, n) + 2.0 * k as f64)
}

/// `n·ln(rss/n) + k·ln(n)`; a zero residual sum gives −∞.
pub fn bic(rss: f64, n: usize, k: usize) -> Result<f64> {
    check_criterion_args(rss, n, k)?;
    Ok(log_likelihood_term(rss, n) + k as f64 * (n as f64).ln())
}

/// Nested-model F-test of whether the extra predictors of `full` reduce the
/// residual sum significantly.
pub fn partial_f(full: &FitResult, reduced: &FitResult) -> Result<(f64, f64)> {
    if full.n != reduced.n {
        return Err(Error::NotNested(format!(
            "observation counts differ ({} vs {})",
            full.n, reduced.n
        )));
    }
    if reduced.p >= full.p {
        return Err(Error::NotNested(format!(
            "reduced model has {} predictors, full model {}",
            reduced.p, full.p
        )));
    }
    let scale = full.tss.abs().max(reduced.tss.abs()).max(f64::MIN_POSITIVE);
    if (full.tss - reduced.tss).abs() > 1e-9 * scale {
        return Err(Error::NotNested("models were fitted to different responses".into()));
    }
    if reduced.rss < full.rss - 1e-9 * scale {
        return Err(Error::NotNested(
            "reduced model fits better than the full model".into(),
        ));
    }
    let n = full.n;
    if n <= full.p + 1 {
        return Err(Error::Domain(format!("partial F undefined for n={n}, p={}", full.p)));
    }
    let gain = reduced.rss - full.rss;
    if gain <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if full.rss == 0.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    let d1 = (full.p - reduced.p) as f64;
    let d2 = (n - full.p - 1) as f64;
    let f = (gain / d1) / (full.rss / d2);
    Ok((f, f_sf(f, d1, d2)?))
}

/// Convenience: builds rows from a design given column-wise.
pub fn rows_from_columns(columns: &[Vec<f64>], response: &[f64]) -> Result<Vec<PredictorRow>> {
    if let Some(c) = columns.iter().find(|c| c.len() != response.len()) {
        return Err(Error::LengthMismatch { expected: response.len(), got: c.len() });
    }
    (0..response.len())
        .map(|i| PredictorRow::new(columns.iter().map(|c| c[i]).collect(), response[i]))
        .collect()
}
