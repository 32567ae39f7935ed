//! Classical inference for unpenalized exogenous coefficients.
//!
//! The penalized lag part of a fitted model is frozen as an offset
//! `o_t = sum_j b_j y_{t-j}` and the exogenous coefficients are re-estimated by
//! ordinary least squares in `y_t = o_t + a + x_t' d + e_t`. Standard errors
//! are the usual homoskedastic ones; intervals use normal quantiles. No
//! correction for residual autocorrelation is applied.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, SrlError};
use crate::penalty::ExoMode;
use crate::series::{build_design, TimeSeries};
use crate::tuning::SrlFit;

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Reference level of a categorical block; estimate fixed at 0.
    pub baseline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub rows: Vec<CoefficientRow>,
    pub level: f64,
    pub n_rows: usize,
    pub residual_sd: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub offset: Vec<f64>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub response: Vec<f64>,
}

impl CoefficientTable {
    pub fn get(&self, term: &str) -> Option<&CoefficientRow> {
        self.rows.iter().find(|r| r.term == term)
    }
}

/// Indices of columns that are not (numerically) linear combinations of the
/// columns before them.
fn independent_columns(z: &DMatrix<f64>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for j in 0..z.ncols() {
        let mut v = z.column(j).into_owned();
        let norm0 = v.norm();
        for b in &basis {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        // second pass for orthogonality
        for b in &basis {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        let norm = v.norm();
        if norm0 > 0.0 && norm > 1e-9 * norm0 {
            basis.push(v / norm);
            keep.push(j);
        }
    }
    keep
}

/// OLS-with-offset estimates and normal-quantile intervals for the intercept
/// and every exogenous column of `fit`, evaluated on `ts` (normally the
/// training series).
pub fn infer_exogenous(fit: &SrlFit, ts: &TimeSeries, level: f64) -> Result<CoefficientTable> {
    if !(level > 0.0 && level < 1.0) {
        return Err(SrlError::InvalidInput(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if fit.k() > 0 && fit.meta.exo_mode != ExoMode::Unpenalized {
        return Err(SrlError::MethodMismatch(
            "offset inference requires unpenalized exogenous coefficients".into(),
        ));
    }
    if ts.k() != fit.k() {
        return Err(SrlError::InvalidInput(format!(
            "series has {} exogenous columns, the model expects {}",
            ts.k(),
            fit.k()
        )));
    }
    let p = fit.p_star();
    let design = build_design(ts, p)?;
    let r = design.rows();
    let k = fit.k();

    let lag = design.lag_cols();
    let offset: Vec<f64> = (0..r)
        .map(|i| {
            fit.lag_coefs
                .iter()
                .enumerate()
                .filter(|(_, b)| **b != 0.0)
                .map(|(j, b)| b * lag[(i, j)])
                .sum()
        })
        .collect();
    let target = DVector::from_fn(r, |i, _| design.response[i] - offset[i]);

    let mut z = DMatrix::from_element(r, 1 + k, 1.0);
    z.columns_mut(1, k).copy_from(&design.exog_cols());
    let keep = independent_columns(&z);
    let mut warnings = Vec::new();
    let names: Vec<String> = std::iter::once(INTERCEPT.to_string())
        .chain(fit.meta.exog_names.iter().cloned())
        .collect();
    for (j, name) in names.iter().enumerate() {
        if !keep.contains(&j) {
            warnings.push(format!(
                "'{name}' is aliased with earlier columns and was dropped"
            ));
        }
    }
    let zk = z.select_columns(&keep);
    let m = keep.len();
    if r <= m {
        return Err(SrlError::InvalidInput(format!(
            "{r} rows cannot support {m} coefficients"
        )));
    }
    let qr = zk.clone().qr();
    let rmat = qr.r();
    let qty = qr.q().transpose() * &target;
    let coef = rmat
        .solve_upper_triangular(&qty)
        .ok_or_else(|| SrlError::InvalidInput("singular exogenous block".into()))?;
    let fitted_part = &zk * &coef;
    let residuals: Vec<f64> = (0..r).map(|i| target[i] - fitted_part[i]).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (r - m) as f64;
    let rinv = rmat
        .try_inverse()
        .ok_or_else(|| SrlError::InvalidInput("singular exogenous block".into()))?;
    let cov_unscaled = &rinv * rinv.transpose();

    let zq = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0);

    let mut est = vec![None; 1 + k];
    for (a, &j) in keep.iter().enumerate() {
        let se = (sigma2 * cov_unscaled[(a, a)]).max(0.0).sqrt();
        est[j] = Some((coef[a], se));
    }

    let mut rows = Vec::with_capacity(1 + k + fit.meta.factors.len());
    if let Some((b, se)) = est[0] {
        rows.push(estimate_row(INTERCEPT, b, se, zq));
    }
    for col in 0..k {
        if let Some(block) = fit
            .meta
            .factors
            .iter()
            .find(|f| f.columns.first() == Some(&col))
        {
            rows.push(baseline_row(&format!("{}={}", block.name, block.baseline)));
        }
        if let Some((b, se)) = est[col + 1] {
            rows.push(estimate_row(&names[col + 1], b, se, zq));
        }
    }

    let fitted: Vec<f64> = (0..r).map(|i| offset[i] + fitted_part[i]).collect();
    Ok(CoefficientTable {
        rows,
        level,
        n_rows: r,
        residual_sd: sigma2.sqrt(),
        warnings,
        offset,
        fitted,
        residuals,
        response: design.response.iter().copied().collect(),
    })
}

fn estimate_row(term: &str, b: f64, se: f64, zq: f64) -> CoefficientRow {
    CoefficientRow {
        term: term.to_string(),
        estimate: b,
        std_error: se,
        ci_low: b - zq * se,
        ci_high: b + zq * se,
        baseline: false,
    }
}

fn baseline_row(term: &str) -> CoefficientRow {
    CoefficientRow {
        term: term.to_string(),
        estimate: 0.0,
        std_error: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
        baseline: true,
    }
}
