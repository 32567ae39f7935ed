//! Joint selection of the weight exponent `gamma` and the lasso penalty
//! `lambda` by an information criterion.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};
use crate::lasso::{
    default_min_ratio, lambda_grid, GramCache, DEFAULT_MAX_ITER, DEFAULT_N_LAMBDA, DEFAULT_TOL,
};
use crate::pacf::pacf;
use crate::penalty::{
    assemble_weights, endo_weights, ExoMode, PenaltyWeights, WeightScheme, DEFAULT_CAP,
};
use crate::series::{build_design, standardize, ArDesign, FactorBlock, TimeSeries};

pub const DEFAULT_GAMMAS: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Aicc,
    Bic,
}

/// Small-sample corrected AIC for a Gaussian linear model, up to an additive
/// constant. Infinite when `n <= k + 1`.
pub fn aicc(rss: f64, n: usize, k: usize) -> f64 {
    if n <= k + 1 {
        return f64::INFINITY;
    }
    let (nf, kf) = (n as f64, k as f64);
    nf * (rss / nf).ln() + 2.0 * kf + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0)
}

pub fn bic(rss: f64, n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    nf * (rss / nf).ln() + kf * nf.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningGrid {
    pub gammas: Vec<f64>,
    pub n_lambda: usize,
    pub criterion: Criterion,
    pub cap: f64,
    /// Overrides the default `lambda_min / lambda_max` ratio.
    pub lambda_min_ratio: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TuningGrid {
    fn default() -> Self {
        Self {
            gammas: DEFAULT_GAMMAS.to_vec(),
            n_lambda: DEFAULT_N_LAMBDA,
            criterion: Criterion::Aicc,
            cap: DEFAULT_CAP,
            lambda_min_ratio: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl TuningGrid {
    pub fn with_criterion(mut self, criterion: Criterion) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn with_gammas(mut self, gammas: Vec<f64>) -> Self {
        self.gammas = gammas;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.gammas.contains(&0.0) {
            return Err(SrlError::Config(
                "the gamma grid must contain 0 (the ordinary lasso)".into(),
            ));
        }
        if self.gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(SrlError::Config("gammas must be finite and >= 0".into()));
        }
        if self.n_lambda == 0 {
            return Err(SrlError::Config("n_lambda must be >= 1".into()));
        }
        if !(self.cap > 1.0) {
            return Err(SrlError::Config("weight cap must exceed 1".into()));
        }
        Ok(())
    }
}

/// One scored `(gamma, lambda)` candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcRow {
    pub gamma: f64,
    pub lambda: f64,
    pub df: usize,
    pub rss: f64,
    pub aicc: f64,
    pub bic: f64,
    pub converged: bool,
}

impl IcRow {
    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aicc => self.aicc,
            Criterion::Bic => self.bic,
        }
    }
}

/// Everything needed to map coefficients back and to rebuild designs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub p_star: usize,
    pub n_obs: usize,
    pub n_rows: usize,
    pub col_means: Vec<f64>,
    pub col_sds: Vec<f64>,
    pub response_mean: f64,
    pub constant_cols: Vec<usize>,
    pub scheme: WeightScheme,
    pub exo_mode: ExoMode,
    pub criterion: Criterion,
    pub exog_names: Vec<String>,
    pub factors: Vec<FactorBlock>,
}

/// A tuned model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrlFit {
    pub gamma_opt: f64,
    pub lambda_opt: f64,
    pub intercept: f64,
    /// Raw-scale coefficients on lags `1..=p_star`.
    pub lag_coefs: Vec<f64>,
    /// Raw-scale coefficients on the exogenous columns.
    pub exog_coefs: Vec<f64>,
    /// 1-based lags with nonzero coefficients.
    pub active_lags: Vec<usize>,
    pub df: usize,
    pub rss: f64,
    /// Coefficients on the standardized design.
    pub std_coefs: Vec<f64>,
    pub std_intercept: f64,
    /// Normalized weights at the selected `gamma`.
    pub weights: PenaltyWeights,
    pub meta: TrainMeta,
    #[serde(skip)]
    pub ic_table: Vec<IcRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SrlFit {
    pub fn p_star(&self) -> usize {
        self.meta.p_star
    }

    pub fn k(&self) -> usize {
        self.exog_coefs.len()
    }

    /// Fitted value for time `t` (0-based) of `values`, given the exogenous
    /// row at `t`. Requires `t >= p_star`.
    pub fn predict_at(&self, values: &[f64], t: usize, exog_row: Option<&[f64]>) -> f64 {
        let mut yhat = self.intercept;
        for (j, &b) in self.lag_coefs.iter().enumerate() {
            if b != 0.0 {
                yhat += b * values[t - j - 1];
            }
        }
        if let Some(row) = exog_row {
            yhat += row
                .iter()
                .zip(&self.exog_coefs)
                .map(|(x, b)| x * b)
                .sum::<f64>();
        }
        yhat
    }
}

/// Index of the best row: lowest score, ties toward larger `lambda`, then
/// smaller `gamma`. `None` when no row has a finite-or-negative-infinite score.
pub fn select_best(rows: &[IcRow], criterion: Criterion) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        let s = row.score(criterion);
        if s.is_nan() || s == f64::INFINITY {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &rows[b];
                let cs = cur.score(criterion);
                let better = s < cs
                    || (s == cs
                        && (row.lambda > cur.lambda
                            || (row.lambda == cur.lambda && row.gamma < cur.gamma)));
                if better {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

fn exo_first_stage(design: &ArDesign) -> Result<Vec<f64>> {
    let ex = design.exog_cols().into_owned();
    let svd = ex.svd(true, true);
    let sol = svd
        .solve(&design.response, 1e-10)
        .map_err(|e| SrlError::Tuning(format!("first-stage OLS failed: {e}")))?;
    Ok(sol.iter().copied().collect())
}

/// Fits lasso paths for every `gamma` on the grid and returns the
/// criterion-minimizing model mapped back to the raw scale.
pub fn fit_srl(
    ts: &TimeSeries,
    p_star: usize,
    scheme: WeightScheme,
    grid: &TuningGrid,
    exo_mode: ExoMode,
) -> Result<SrlFit> {
    grid.validate()?;
    if ts.n() < p_star + 2 {
        return Err(SrlError::InvalidOrder(format!(
            "training series of length {} is too short for p_star = {p_star}",
            ts.n()
        )));
    }
    let design = standardize(build_design(ts, p_star)?)?;
    let rows = design.rows();
    let k = design.k;
    let mut warnings = Vec::new();

    let pacf_est = if scheme.needs_pacf() {
        let p = pacf(ts.values(), p_star)?;
        warnings.extend(p.warnings.iter().cloned());
        Some(p)
    } else {
        None
    };
    let exo_stats = if exo_mode == ExoMode::Adaptive && k > 0 {
        Some(exo_first_stage(&design)?)
    } else {
        None
    };

    let cache = GramCache::new(&design.x, &design.response)?;
    let ratio = grid
        .lambda_min_ratio
        .unwrap_or_else(|| default_min_ratio(rows, design.ncols()));

    let mut ic_table = Vec::with_capacity(grid.gammas.len() * grid.n_lambda);
    // (row offset, weights, path) per gamma
    let mut fits = Vec::with_capacity(grid.gammas.len());
    for &gamma in &grid.gammas {
        let endo = endo_weights(&scheme, p_star, pacf_est.as_ref(), gamma, grid.cap)?;
        let weights = assemble_weights(
            endo,
            k,
            exo_mode,
            exo_stats.as_deref(),
            scheme,
            gamma,
            grid.cap,
        )?
        .normalized();
        let lmax = cache.lambda_max(&weights.w)?;
        if !(lmax > 0.0) {
            return Err(SrlError::Tuning(format!(
                "lambda_max is {lmax} at gamma = {gamma}; the response is fully explained by unpenalized terms"
            )));
        }
        let lambdas = lambda_grid(lmax, grid.n_lambda, ratio)?;
        let path = cache.fit_path(&weights.w, &lambdas, grid.tol, grid.max_iter)?;
        for l in 0..path.len() {
            let rss = path.rss[l];
            let df = path.df[l];
            ic_table.push(IcRow {
                gamma,
                lambda: path.lambdas[l],
                df,
                rss,
                aicc: aicc(rss, rows, df),
                bic: bic(rss, rows, df),
                converged: path.converged[l],
            });
        }
        let unconverged = path.converged.iter().filter(|c| !**c).count();
        if unconverged > 0 {
            warnings.push(format!(
                "gamma = {gamma}: {unconverged} lambda values hit the iteration cap"
            ));
        }
        warnings.extend(weights.warnings.iter().cloned());
        fits.push((weights, path));
    }

    let best = select_best(&ic_table, grid.criterion).ok_or_else(|| {
        SrlError::Tuning("every (gamma, lambda) candidate is inadmissible".into())
    })?;
    let (gi, li) = (best / grid.n_lambda, best % grid.n_lambda);
    let (weights, path) = fits.swap_remove(gi);
    let std_coefs = path.betas[li].clone();
    let std_intercept = path.intercepts[li];
    let (intercept, coefs) = design.to_original_scale(std_intercept, &std_coefs);
    let lag_coefs = coefs[..p_star].to_vec();
    let exog_coefs = coefs[p_star..].to_vec();
    let active_lags = (1..=p_star).filter(|&j| lag_coefs[j - 1] != 0.0).collect();

    Ok(SrlFit {
        gamma_opt: ic_table[best].gamma,
        lambda_opt: ic_table[best].lambda,
        intercept,
        lag_coefs,
        exog_coefs,
        active_lags,
        df: ic_table[best].df,
        rss: ic_table[best].rss,
        std_coefs,
        std_intercept,
        weights,
        meta: TrainMeta {
            p_star,
            n_obs: ts.n(),
            n_rows: rows,
            col_means: design.col_means.clone(),
            col_sds: design.col_sds.clone(),
            response_mean: design.response_mean,
            constant_cols: design.constant_cols.clone(),
            scheme,
            exo_mode,
            criterion: grid.criterion,
            exog_names: ts.exog_names().to_vec(),
            factors: ts.factors().to_vec(),
        },
        ic_table,
        warnings,
    })
}

/// Fitted values of `fit` on the standardized design it was trained on, on
/// the scale of the centered response.
pub fn standardized_fitted(fit: &SrlFit, design: &ArDesign) -> DVector<f64> {
    let coefs = DVector::from_column_slice(&fit.std_coefs);
    let mut f = &design.x * coefs;
    f.add_scalar_mut(fit.std_intercept);
    f
}
