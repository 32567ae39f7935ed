//! Raw series storage, autoregressive design matrices, column standardization
//! and chronological train/test splitting.
//!
//! Lags are 1-based everywhere in the public surface: lag `j` of row `t` is
//! `y[t - j]`, and column `j - 1` of the lag block holds lag `j`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};

/// Indicator columns that together encode one categorical covariate.
///
/// The baseline level has no column; its effect is absorbed by the intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorBlock {
    pub name: String,
    pub baseline: String,
    /// Indices into the exogenous columns, one per non-baseline level.
    pub columns: Vec<usize>,
}

/// Ordered observations of the target plus optional aligned exogenous columns.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    exog: Option<DMatrix<f64>>,
    exog_names: Vec<String>,
    factors: Vec<FactorBlock>,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(SrlError::MissingValue { index }),
        None => Ok(()),
    }
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SrlError::InvalidInput(format!(
                "a series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self {
            values,
            exog: None,
            exog_names: Vec::new(),
            factors: Vec::new(),
        })
    }

    /// Series with exogenous covariates; `exog` is n×k and row-aligned with `values`.
    pub fn with_exog(values: Vec<f64>, exog: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        let mut ts = Self::new(values)?;
        ts.set_exog(exog, names)?;
        Ok(ts)
    }

    fn set_exog(&mut self, exog: DMatrix<f64>, names: Vec<String>) -> Result<()> {
        if exog.nrows() != self.values.len() {
            return Err(SrlError::InvalidInput(format!(
                "exogenous block has {} rows but the series has {} observations",
                exog.nrows(),
                self.values.len()
            )));
        }
        if names.len() != exog.ncols() {
            return Err(SrlError::InvalidInput(format!(
                "{} exogenous names supplied for {} columns",
                names.len(),
                exog.ncols()
            )));
        }
        if let Some(pos) = exog.iter().position(|v| !v.is_finite()) {
            return Err(SrlError::MissingValue {
                index: pos % exog.nrows(),
            });
        }
        if exog.ncols() == 0 {
            self.exog = None;
            self.exog_names.clear();
        } else {
            self.exog = Some(exog);
            self.exog_names = names;
        }
        Ok(())
    }

    /// Appends numeric covariate columns.
    pub fn add_exog_columns(&mut self, cols: DMatrix<f64>, names: Vec<String>) -> Result<()> {
        if cols.ncols() == 0 {
            return Ok(());
        }
        let (merged, mut merged_names) = match self.exog.take() {
            Some(old) => {
                if cols.nrows() != old.nrows() {
                    self.exog = Some(old);
                    return Err(SrlError::InvalidInput(format!(
                        "new exogenous columns have {} rows, expected {}",
                        cols.nrows(),
                        self.values.len()
                    )));
                }
                let k_old = old.ncols();
                let mut m = DMatrix::zeros(old.nrows(), k_old + cols.ncols());
                m.columns_mut(0, k_old).copy_from(&old);
                m.columns_mut(k_old, cols.ncols()).copy_from(&cols);
                (m, std::mem::take(&mut self.exog_names))
            }
            None => (cols, Vec::new()),
        };
        merged_names.extend(names);
        self.set_exog(merged, merged_names)
    }

    /// Expands a categorical covariate into indicator columns named
    /// `name=level`, omitting `baseline`. Levels are ordered by first appearance.
    pub fn add_categorical(&mut self, name: &str, labels: &[String], baseline: &str) -> Result<()> {
        if labels.len() != self.values.len() {
            return Err(SrlError::InvalidInput(format!(
                "categorical '{name}' has {} labels for {} observations",
                labels.len(),
                self.values.len()
            )));
        }
        let mut levels: Vec<&str> = Vec::new();
        for l in labels {
            if !levels.contains(&l.as_str()) {
                levels.push(l);
            }
        }
        if !levels.contains(&baseline) {
            return Err(SrlError::Config(format!(
                "baseline '{baseline}' is not a level of '{name}' (levels: {})",
                levels.join(", ")
            )));
        }
        let kept: Vec<&str> = levels.into_iter().filter(|l| *l != baseline).collect();
        let n = self.values.len();
        let cols = DMatrix::from_fn(
            n,
            kept.len(),
            |i, j| {
                if labels[i] == kept[j] {
                    1.0
                } else {
                    0.0
                }
            },
        );
        let start = self.k();
        let names = kept.iter().map(|l| format!("{name}={l}")).collect();
        self.add_exog_columns(cols, names)?;
        self.factors.push(FactorBlock {
            name: name.to_string(),
            baseline: baseline.to_string(),
            columns: (start..start + kept.len()).collect(),
        });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.exog.as_ref().map_or(0, |x| x.ncols())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exog(&self) -> Option<&DMatrix<f64>> {
        self.exog.as_ref()
    }

    pub fn exog_names(&self) -> &[String] {
        &self.exog_names
    }

    pub fn factors(&self) -> &[FactorBlock] {
        &self.factors
    }

    pub(crate) fn set_factors(&mut self, factors: Vec<FactorBlock>) {
        self.factors = factors;
    }

    /// Contiguous sub-series `[start, end)`. May hold a single observation.
    pub(crate) fn slice(&self, start: usize, end: usize) -> TimeSeries {
        TimeSeries {
            values: self.values[start..end].to_vec(),
            exog: self
                .exog
                .as_ref()
                .map(|x| x.rows(start, end - start).into_owned()),
            exog_names: self.exog_names.clone(),
            factors: self.factors.clone(),
        }
    }
}

/// Response vector and lag/exogenous design for a fixed maximum lag.
///
/// Columns `0..p_star` are lags `1..=p_star`; columns `p_star..p_star + k`
/// are the exogenous covariates in their original order.
#[derive(Clone, Debug)]
pub struct ArDesign {
    pub response: DVector<f64>,
    pub x: DMatrix<f64>,
    pub p_star: usize,
    pub k: usize,
    pub col_means: Vec<f64>,
    pub col_sds: Vec<f64>,
    pub response_mean: f64,
    /// Columns with no variation, detected at construction.
    pub constant_cols: Vec<usize>,
    pub standardized: bool,
}

impl ArDesign {
    pub fn rows(&self) -> usize {
        self.response.len()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn lag_cols(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.x.columns(0, self.p_star)
    }

    pub fn exog_cols(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.x.columns(self.p_star, self.k)
    }

    /// Maps coefficients fitted on this design's scale back to the raw
    /// series scale. Returns `(intercept, coefficients)`.
    pub fn to_original_scale(&self, intercept: f64, beta: &[f64]) -> (f64, Vec<f64>) {
        let mut b0 = intercept + self.response_mean;
        let coefs: Vec<f64> = beta
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                if self.constant_cols.contains(&j) {
                    return 0.0;
                }
                let orig = b / self.col_sds[j];
                b0 -= orig * self.col_means[j];
                orig
            })
            .collect();
        (b0, coefs)
    }
}

fn is_constant(col: impl Iterator<Item = f64>) -> bool {
    let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0)
}

/// Builds the lag design `y_t ~ y_{t-1} .. y_{t-p_star} + exog_t` for
/// `t = p_star + 1 ..= n`.
pub fn build_design(ts: &TimeSeries, p_star: usize) -> Result<ArDesign> {
    let n = ts.n();
    if p_star == 0 || p_star >= n {
        return Err(SrlError::InvalidOrder(format!(
            "p_star must satisfy 1 <= p_star < n (p_star = {p_star}, n = {n})"
        )));
    }
    let rows = n - p_star;
    let k = ts.k();
    let q = p_star + k;
    let y = ts.values();
    let mut x = DMatrix::zeros(rows, q);
    for j in 1..=p_star {
        let src = &y[p_star - j..n - j];
        x.column_mut(j - 1).copy_from_slice(src);
    }
    if let Some(ex) = ts.exog() {
        x.columns_mut(p_star, k).copy_from(&ex.rows(p_star, rows));
    }
    let constant_cols = (0..q)
        .filter(|&j| is_constant(x.column(j).iter().copied()))
        .collect();
    Ok(ArDesign {
        response: DVector::from_column_slice(&y[p_star..]),
        x,
        p_star,
        k,
        col_means: vec![0.0; q],
        col_sds: vec![1.0; q],
        response_mean: 0.0,
        constant_cols,
        standardized: false,
    })
}

/// Centers every column and scales non-constant ones to unit sample
/// standard deviation; the response is centered only. Constants compose, so
/// repeated calls keep coefficients mappable to the raw scale.
pub fn standardize(mut design: ArDesign) -> Result<ArDesign> {
    let rows = design.rows();
    if rows < 2 {
        return Err(SrlError::InvalidInput(
            "standardization needs at least 2 design rows".into(),
        ));
    }
    let r = rows as f64;
    for j in 0..design.ncols() {
        let mut col = design.x.column_mut(j);
        let mean = col.sum() / r;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (r - 1.0)).sqrt();
        let flagged = design.constant_cols.contains(&j);
        if flagged {
            col.fill(0.0);
            design.col_means[j] += design.col_sds[j] * mean;
            continue;
        }
        if !(sd > 0.0) || sd <= 1e-14 * mean.abs().max(1.0) {
            return Err(SrlError::DegenerateColumn { column: j });
        }
        col.iter_mut().for_each(|v| *v = (*v - mean) / sd);
        design.col_means[j] += design.col_sds[j] * mean;
        design.col_sds[j] *= sd;
    }
    let ym = design.response.sum() / r;
    design.response.iter_mut().for_each(|v| *v -= ym);
    design.response_mean += ym;
    design.standardized = true;
    Ok(design)
}

/// Chronological split: the first `floor(fraction * n)` observations train,
/// the rest test. `fraction == 1.0` yields no test partition.
pub fn split_train_test(
    ts: &TimeSeries,
    train_fraction: f64,
) -> Result<(TimeSeries, Option<TimeSeries>)> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(SrlError::Split(format!(
            "train fraction must lie in (0, 1], got {train_fraction}"
        )));
    }
    let n = ts.n();
    let n_train = train_len(n, train_fraction);
    if n_train < 2 {
        return Err(SrlError::Split(format!(
            "fraction {train_fraction} leaves {n_train} training observations"
        )));
    }
    if n_train == n {
        if train_fraction < 1.0 {
            return Err(SrlError::Split(format!(
                "fraction {train_fraction} leaves an empty test set; use 1.0 to disable evaluation"
            )));
        }
        return Ok((ts.clone(), None));
    }
    Ok((ts.slice(0, n_train), Some(ts.slice(n_train, n))))
}

/// Number of training observations for a split fraction.
pub fn train_len(n: usize, train_fraction: f64) -> usize {
    ((train_fraction * n as f64) + 1e-9).floor() as usize
}

/// `min(ceil(n / 4), p_max)`.
pub fn default_p_star(n: usize, p_max: Option<usize>) -> usize {
    let quarter = n.div_ceil(4);
    p_max.map_or(quarter, |p| quarter.min(p)).max(1)
}
