//! Sample autocorrelation and partial autocorrelation.
//!
//! The PACF is obtained from the sample ACF with the Durbin-Levinson
//! recursion, so `pacf[j - 1]` is the last coefficient of the Yule-Walker
//! AR(j) fit.

use serde::Serialize;

use crate::error::{Result, SrlError};

const CLAMP: f64 = 1.0 - 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PacfResult {
    /// Partial autocorrelations for lags `1..=max_lag`.
    pub pacf: Vec<f64>,
    /// Autocorrelations for lags `1..=max_lag`.
    pub acf: Vec<f64>,
    pub max_lag: usize,
    pub n: usize,
    /// `2 / sqrt(n)`.
    pub conf_band: f64,
    pub warnings: Vec<String>,
}

/// Sample autocorrelations `r_1..r_max_lag` using the divisor-`n` autocovariance.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if max_lag == 0 || max_lag >= n {
        return Err(SrlError::InvalidOrder(format!(
            "max_lag must satisfy 1 <= max_lag < n (max_lag = {max_lag}, n = {n})"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if !(denom > 0.0) || denom <= 1e-24 * mean.abs().max(1.0).powi(2) * n as f64 {
        return Err(SrlError::ZeroVariance(
            "autocorrelation of a constant series is undefined".into(),
        ));
    }
    Ok((1..=max_lag)
        .map(|j| {
            let num: f64 = dev[j..].iter().zip(&dev[..n - j]).map(|(a, b)| a * b).sum();
            num / denom
        })
        .collect())
}

/// Durbin-Levinson recursion on a correlation (or covariance) sequence
/// `rho[0..=L]`. Returns the partial autocorrelations for lags `1..=L` and any
/// clamping warnings.
pub fn durbin_levinson(rho: &[f64]) -> (Vec<f64>, Vec<String>) {
    let lags = rho.len().saturating_sub(1);
    let mut pacf = Vec::with_capacity(lags);
    let mut warnings = Vec::new();
    if lags == 0 {
        return (pacf, warnings);
    }
    let r0 = rho[0];
    let mut phi = vec![0.0; lags + 1];
    let mut prev = vec![0.0; lags + 1];
    // innovation variance relative to r0
    let mut v = r0;
    for k in 1..=lags {
        let mut num = rho[k];
        for j in 1..k {
            num -= prev[j] * rho[k - j];
        }
        let mut a = if v > 0.0 { num / v } else { 0.0 };
        if !a.is_finite() || a.abs() >= 1.0 {
            let clamped = if a.is_finite() {
                a.signum() * CLAMP
            } else {
                0.0
            };
            warnings.push(format!(
                "non-invertible step at lag {k} (pacf {a}); clamped to {clamped}"
            ));
            a = clamped;
        }
        phi[k] = a;
        for j in 1..k {
            phi[j] = prev[j] - a * prev[k - j];
        }
        v *= 1.0 - a * a;
        pacf.push(a);
        prev[1..=k].copy_from_slice(&phi[1..=k]);
    }
    (pacf, warnings)
}

/// Sample PACF for lags `1..=max_lag`.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<PacfResult> {
    let r = acf(values, max_lag)?;
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    rho.extend_from_slice(&r);
    let (mut p, warnings) = durbin_levinson(&rho);
    // base case is exact by definition
    p[0] = r[0];
    Ok(PacfResult {
        pacf: p,
        acf: r,
        max_lag,
        n: values.len(),
        conf_band: 2.0 / (values.len() as f64).sqrt(),
        warnings,
    })
}
