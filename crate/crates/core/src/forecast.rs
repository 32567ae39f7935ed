//! Multi-step prediction, rolling-sum aggregation and out-of-sample metrics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};
use crate::series::TimeSeries;
use crate::tuning::SrlFit;

/// Recursive `h`-step forecast from the end of `history`.
///
/// Step `s` uses observed lags where they exist and earlier predictions for
/// the rest. Future covariates must be supplied; they are never extrapolated.
pub fn predict_recursive(
    fit: &SrlFit,
    history: &[f64],
    exog_future: Option<&DMatrix<f64>>,
    h: usize,
) -> Result<Vec<f64>> {
    let p = fit.p_star();
    if history.len() < p {
        return Err(SrlError::InvalidInput(format!(
            "history has {} observations, the model needs {p}",
            history.len()
        )));
    }
    let k = fit.k();
    if k > 0 {
        match exog_future {
            None => {
                return Err(SrlError::InvalidInput(
                    "the model has exogenous terms; future covariate rows are required".into(),
                ))
            }
            Some(ex) if ex.nrows() < h || ex.ncols() != k => {
                return Err(SrlError::InvalidInput(format!(
                    "future covariates are {}x{}, need at least {h}x{k}",
                    ex.nrows(),
                    ex.ncols()
                )))
            }
            _ => {}
        }
    }
    let mut buf: Vec<f64> = history[history.len() - p..].to_vec();
    buf.reserve(h);
    let mut row = vec![0.0; k];
    let mut out = Vec::with_capacity(h);
    for s in 0..h {
        let exog_row = match exog_future {
            Some(ex) if k > 0 => {
                for (j, r) in row.iter_mut().enumerate() {
                    *r = ex[(s, j)];
                }
                Some(row.as_slice())
            }
            _ => None,
        };
        let t = buf.len();
        let yhat = fit.predict_at(&buf, t, exog_row);
        buf.push(yhat);
        out.push(yhat);
    }
    Ok(out)
}

fn exog_row(ts: &TimeSeries, t: usize) -> Option<Vec<f64>> {
    ts.exog().map(|ex| ex.row(t).iter().copied().collect())
}

fn check_exog(fit: &SrlFit, ts: &TimeSeries) -> Result<()> {
    if ts.k() != fit.k() {
        return Err(SrlError::InvalidInput(format!(
            "series has {} exogenous columns, the model expects {}",
            ts.k(),
            fit.k()
        )));
    }
    Ok(())
}

/// Rolling-origin one-step predictions for `t = start..n`, each made from the
/// observed series through `t - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneStep {
    /// 0-based index of each predicted observation.
    pub index: Vec<usize>,
    pub predicted: Vec<f64>,
    pub actual: Vec<f64>,
}

pub fn one_step_rolling(fit: &SrlFit, ts: &TimeSeries, start: usize) -> Result<OneStep> {
    check_exog(fit, ts)?;
    let p = fit.p_star();
    if start < p || start >= ts.n() {
        return Err(SrlError::InvalidInput(format!(
            "evaluation start {start} must lie in [{p}, {})",
            ts.n()
        )));
    }
    let y = ts.values();
    let mut out = OneStep {
        index: Vec::with_capacity(ts.n() - start),
        predicted: Vec::with_capacity(ts.n() - start),
        actual: Vec::with_capacity(ts.n() - start),
    };
    for t in start..ts.n() {
        let row = exog_row(ts, t);
        out.index.push(t);
        out.predicted.push(fit.predict_at(y, t, row.as_deref()));
        out.actual.push(y[t]);
    }
    Ok(out)
}

/// Recursive forecasts from every origin whose full horizon is observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub horizon: usize,
    /// Origin `o` forecasts observations `o..o + horizon` from `y[..o]`.
    pub origins: Vec<usize>,
    /// `point_forecasts[i][s]`: `(s + 1)`-step prediction from `origins[i]`.
    pub point_forecasts: Vec<Vec<f64>>,
    pub actuals: Vec<Vec<f64>>,
    pub rolling_sums: Vec<f64>,
}

pub fn forecast_matrix(
    fit: &SrlFit,
    ts: &TimeSeries,
    start: usize,
    h: usize,
) -> Result<ForecastResult> {
    check_exog(fit, ts)?;
    if h == 0 {
        return Err(SrlError::InvalidInput("horizon must be >= 1".into()));
    }
    let p = fit.p_star();
    if start < p {
        return Err(SrlError::InvalidInput(format!(
            "forecast start {start} precedes the first usable origin {p}"
        )));
    }
    let n = ts.n();
    let y = ts.values();
    let last = n.checked_sub(h);
    let origins: Vec<usize> = match last {
        Some(last) if last >= start => (start..=last).collect(),
        _ => Vec::new(),
    };
    let mut res = ForecastResult {
        horizon: h,
        origins: origins.clone(),
        point_forecasts: Vec::with_capacity(origins.len()),
        actuals: Vec::with_capacity(origins.len()),
        rolling_sums: Vec::with_capacity(origins.len()),
    };
    for &o in &origins {
        let fut = ts.exog().map(|ex| ex.rows(o, h).into_owned());
        let f = predict_recursive(fit, &y[..o], fut.as_ref(), h)?;
        res.rolling_sums.push(f.iter().sum());
        res.point_forecasts.push(f);
        res.actuals.push(y[o..o + h].to_vec());
    }
    Ok(res)
}

/// `h`-step cumulative predictions against the matching observed sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RollingSums {
    pub horizon: usize,
    pub origins: Vec<usize>,
    pub predicted: Vec<f64>,
    pub actual: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn rolling_sum_forecast(
    fit: &SrlFit,
    ts: &TimeSeries,
    start: usize,
    h: usize,
) -> Result<RollingSums> {
    let fm = forecast_matrix(fit, ts, start, h)?;
    let mut warnings = Vec::new();
    if fm.origins.is_empty() {
        warnings.push(format!(
            "evaluation window of {} observations is shorter than the horizon {h}",
            ts.n().saturating_sub(start)
        ));
    }
    Ok(RollingSums {
        horizon: h,
        actual: fm.actuals.iter().map(|a| a.iter().sum()).collect(),
        predicted: fm.rolling_sums,
        origins: fm.origins,
        warnings,
    })
}

fn check_pair(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.len() != actual.len() {
        return Err(SrlError::InvalidInput(format!(
            "{} predictions for {} observations",
            pred.len(),
            actual.len()
        )));
    }
    if pred.is_empty() {
        return Err(SrlError::InvalidInput("no observations to score".into()));
    }
    Ok(())
}

/// Root mean squared prediction error.
pub fn rmspe(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Out-of-sample R²; may be negative.
pub fn r_squared(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let sst: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if !(sst > 0.0) {
        return Err(SrlError::UndefinedMetric(
            "R² is undefined for constant observations".into(),
        ));
    }
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok(1.0 - sse / sst)
}

pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    Ok(pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).abs())
        .sum::<f64>()
        / pred.len() as f64)
}

/// Mean absolute percentage error with the out-of-sample mean as the
/// denominator, which tolerates zero observations.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(SrlError::UndefinedMetric(
            "MAPE is undefined when the observed mean is 0".into(),
        ));
    }
    let abs: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    Ok(100.0 * abs / (n * mean))
}

/// Out-of-sample accuracy, fields in reporting order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub r2: f64,
    pub rmspe: f64,
    pub mae: f64,
    pub mape: f64,
    pub n_star: usize,
}

impl AccuracyReport {
    pub fn compute(pred: &[f64], actual: &[f64]) -> Result<Self> {
        Ok(Self {
            r2: r_squared(pred, actual)?,
            rmspe: rmspe(pred, actual)?,
            mae: mae(pred, actual)?,
            mape: mape(pred, actual)?,
            n_star: pred.len(),
        })
    }
}
