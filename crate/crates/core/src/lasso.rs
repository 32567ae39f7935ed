//! Weighted-lasso regularization paths by cyclic coordinate descent.
//!
//! For each `lambda` on a decreasing grid the solver minimizes
//!
//! ```text
//! (1 / 2r) ||y - b0 - X b||^2 + lambda * sum_j w_j |b_j|
//! ```
//!
//! with an unpenalized intercept handled by centering. Columns with `w_j = 0`
//! are unpenalized. Updates run on the Gram matrix of the centered design, so
//! the `O(r q^2)` product is paid once per design and reused across every
//! weight vector and every `lambda`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SrlError};

pub const DEFAULT_N_LAMBDA: usize = 101;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// A single weighted-lasso path problem.
#[derive(Clone, Debug)]
pub struct LassoProblem<'a> {
    pub x: &'a DMatrix<f64>,
    pub y: &'a DVector<f64>,
    pub weights: &'a [f64],
    /// Strictly decreasing, positive.
    pub lambdas: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> LassoProblem<'a> {
    /// Problem on the default 101-point grid below `lambda_max`.
    pub fn with_default_grid(
        x: &'a DMatrix<f64>,
        y: &'a DVector<f64>,
        weights: &'a [f64],
    ) -> Result<Self> {
        let lmax = lambda_max(x, y, weights)?;
        let ratio = default_min_ratio(x.nrows(), x.ncols());
        Ok(Self {
            x,
            y,
            weights,
            lambdas: lambda_grid(lmax, DEFAULT_N_LAMBDA, ratio)?,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        })
    }
}

/// Coefficients and fit statistics along a `lambda` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LassoPath {
    pub lambdas: Vec<f64>,
    /// `betas[l][j]`: coefficient of column `j` at `lambdas[l]`.
    pub betas: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    pub rss: Vec<f64>,
    /// Nonzero coefficients, counting the intercept and unpenalized columns.
    pub df: Vec<usize>,
    pub converged: Vec<bool>,
    pub n_iter: Vec<usize>,
}

impl LassoPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// `lambda_min = ratio * lambda_max`; 1e-3, or 1e-2 when there are at least
/// as many columns as rows.
pub fn default_min_ratio(rows: usize, cols: usize) -> f64 {
    if cols >= rows {
        1e-2
    } else {
        1e-3
    }
}

/// `n` log-spaced values from `lambda_max` down to `ratio * lambda_max`.
pub fn lambda_grid(lambda_max: f64, n: usize, ratio: f64) -> Result<Vec<f64>> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(SrlError::InvalidInput(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    if !(ratio > 0.0 && ratio < 1.0) || n == 0 {
        return Err(SrlError::InvalidInput(format!(
            "invalid lambda grid: n = {n}, ratio = {ratio}"
        )));
    }
    if n == 1 {
        return Ok(vec![lambda_max]);
    }
    let (hi, lo) = (lambda_max.ln(), (lambda_max * ratio).ln());
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| (hi - step * i as f64).exp()).collect())
}

/// Centered cross-products of a design, shared across weight vectors.
pub struct GramCache<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
    /// `Xc' Xc / r`
    gram: DMatrix<f64>,
    /// `Xc' yc / r`
    xty: Vec<f64>,
}

impl<'a> GramCache<'a> {
    pub fn new(x: &'a DMatrix<f64>, y: &'a DVector<f64>) -> Result<Self> {
        let (r, q) = x.shape();
        if y.len() != r {
            return Err(SrlError::InvalidInput(format!(
                "response has {} rows, design has {r}",
                y.len()
            )));
        }
        if r < 2 {
            return Err(SrlError::InvalidInput("need at least 2 rows".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(SrlError::InvalidInput(
                "design or response contains NaN or infinite values".into(),
            ));
        }
        let rf = r as f64;
        let x_mean: Vec<f64> = (0..q).map(|j| x.column(j).sum() / rf).collect();
        let y_mean = y.sum() / rf;
        let mut gram = x.tr_mul(x);
        for a in 0..q {
            for b in 0..q {
                gram[(a, b)] = gram[(a, b)] / rf - x_mean[a] * x_mean[b];
            }
        }
        let xty: Vec<f64> = (0..q)
            .map(|j| x.column(j).dot(y) / rf - x_mean[j] * y_mean)
            .collect();
        Ok(Self {
            x,
            y,
            x_mean,
            y_mean,
            gram,
            xty,
        })
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    fn live(&self, j: usize) -> bool {
        self.gram[(j, j)] > 1e-14
    }

    fn check_weights(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.ncols() {
            return Err(SrlError::InvalidInput(format!(
                "{} weights for {} columns",
                w.len(),
                self.ncols()
            )));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SrlError::InvalidInput(
                "penalty weights must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Least squares on the unpenalized columns alone, returned as a full
    /// coefficient vector with zeros elsewhere.
    fn unpenalized_start(&self, w: &[f64]) -> Vec<f64> {
        let q = self.ncols();
        let free: Vec<usize> = (0..q).filter(|&j| w[j] == 0.0 && self.live(j)).collect();
        let mut beta = vec![0.0; q];
        if free.is_empty() {
            return beta;
        }
        let m = free.len();
        let g = DMatrix::from_fn(m, m, |a, b| self.gram[(free[a], free[b])]);
        let c = DVector::from_fn(m, |a, _| self.xty[free[a]]);
        let sol = match g.clone().cholesky() {
            Some(ch) => ch.solve(&c),
            None => g
                .svd(true, true)
                .solve(&c, 1e-12)
                .unwrap_or_else(|_| DVector::zeros(m)),
        };
        for (a, &j) in free.iter().enumerate() {
            beta[j] = sol[a];
        }
        beta
    }

    fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        let q = self.ncols();
        let mut grad = self.xty.clone();
        for (k, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                let col = self.gram.column(k);
                for j in 0..q {
                    grad[j] -= col[j] * b;
                }
            }
        }
        grad
    }

    /// Smallest `lambda` at which every penalized coefficient is zero.
    pub fn lambda_max(&self, w: &[f64]) -> Result<f64> {
        self.check_weights(w)?;
        let penalized: Vec<usize> = (0..self.ncols())
            .filter(|&j| w[j] > 0.0 && self.live(j))
            .collect();
        if penalized.is_empty() {
            return Err(SrlError::NoPath);
        }
        let beta = self.unpenalized_start(w);
        let grad = self.gradient(&beta);
        Ok(penalized
            .into_iter()
            .map(|j| grad[j].abs() / w[j])
            .fold(0.0, f64::max))
    }

    /// Exact residual sum of squares on the data (not via the Gram identity).
    fn rss(&self, beta: &[f64]) -> f64 {
        let mut res: Vec<f64> = self.y.iter().map(|v| v - self.y_mean).collect();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                let mu = self.x_mean[j];
                for (ri, xi) in res.iter_mut().zip(self.x.column(j).iter()) {
                    *ri -= b * (xi - mu);
                }
            }
        }
        res.iter().map(|v| v * v).sum()
    }

    pub fn fit_path(
        &self,
        w: &[f64],
        lambdas: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<LassoPath> {
        self.check_weights(w)?;
        if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(SrlError::InvalidInput(
                "lambdas must be positive and finite".into(),
            ));
        }
        if lambdas.windows(2).any(|p| p[1] >= p[0]) {
            return Err(SrlError::InvalidInput(
                "lambda grid must be strictly decreasing".into(),
            ));
        }
        if !(tol > 0.0) || max_iter == 0 {
            return Err(SrlError::InvalidInput(
                "tol must be > 0 and max_iter >= 1".into(),
            ));
        }
        let q = self.ncols();
        let live: Vec<bool> = (0..q).map(|j| self.live(j)).collect();
        let n_free = (0..q).filter(|&j| live[j] && w[j] == 0.0).count();

        let mut beta = self.unpenalized_start(w);
        let mut path = LassoPath {
            lambdas: lambdas.to_vec(),
            betas: Vec::with_capacity(lambdas.len()),
            intercepts: Vec::with_capacity(lambdas.len()),
            rss: Vec::with_capacity(lambdas.len()),
            df: Vec::with_capacity(lambdas.len()),
            converged: Vec::with_capacity(lambdas.len()),
            n_iter: Vec::with_capacity(lambdas.len()),
        };

        for &lambda in lambdas {
            let mut grad = self.gradient(&beta);
            let thresholds: Vec<f64> = w.iter().map(|wj| lambda * wj).collect();
            let mut iters = 0;
            let mut converged = false;
            let mut last_obj = objective(&beta, &grad, &self.xty, &thresholds);

            while iters < max_iter {
                let all = self.sweep(0..q, &live, &thresholds, &mut beta, &mut grad);
                iters += 1;
                debug_check_descent(&mut last_obj, &beta, &grad, &self.xty, &thresholds);
                if all < tol && kkt_violation(&beta, &grad, &thresholds, &live) < tol {
                    converged = true;
                    break;
                }
                // settle the active set before the next full sweep
                while iters < max_iter {
                    let active: Vec<usize> = (0..q).filter(|&j| beta[j] != 0.0).collect();
                    let d =
                        self.sweep(active.into_iter(), &live, &thresholds, &mut beta, &mut grad);
                    iters += 1;
                    debug_check_descent(&mut last_obj, &beta, &grad, &self.xty, &thresholds);
                    if d < tol {
                        break;
                    }
                }
            }

            let nonzero_pen = (0..q).filter(|&j| w[j] > 0.0 && beta[j] != 0.0).count();
            let intercept = self.y_mean
                - beta
                    .iter()
                    .zip(&self.x_mean)
                    .map(|(b, m)| b * m)
                    .sum::<f64>();
            path.rss.push(self.rss(&beta));
            path.betas.push(beta.clone());
            path.intercepts.push(intercept);
            path.df.push(nonzero_pen + n_free + 1);
            path.converged.push(converged);
            path.n_iter.push(iters);
        }
        Ok(path)
    }

    /// One cyclic pass over `cols`; returns the largest absolute change.
    fn sweep(
        &self,
        cols: impl Iterator<Item = usize>,
        live: &[bool],
        thresholds: &[f64],
        beta: &mut [f64],
        grad: &mut [f64],
    ) -> f64 {
        let mut max_delta: f64 = 0.0;
        for j in cols {
            if !live[j] {
                continue;
            }
            let gjj = self.gram[(j, j)];
            let z = grad[j] + gjj * beta[j];
            let new = soft_threshold(z, thresholds[j]) / gjj;
            let delta = new - beta[j];
            if delta != 0.0 {
                let col = self.gram.column(j);
                for (g, c) in grad.iter_mut().zip(col.iter()) {
                    *g -= delta * c;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }
}

/// `0.5 b'Gb - c'b + sum t_j |b_j|`, evaluated through `grad = c - G b`.
fn objective(beta: &[f64], grad: &[f64], xty: &[f64], thresholds: &[f64]) -> f64 {
    beta.iter()
        .zip(grad.iter().zip(xty))
        .zip(thresholds)
        .map(|((b, (g, c)), t)| -0.5 * b * (c + g) + t * b.abs())
        .sum()
}

#[inline]
fn debug_check_descent(last: &mut f64, beta: &[f64], grad: &[f64], xty: &[f64], t: &[f64]) {
    if cfg!(debug_assertions) {
        let obj = objective(beta, grad, xty, t);
        debug_assert!(
            obj <= *last + 1e-10 * (1.0 + last.abs()),
            "objective increased across a sweep: {last} -> {obj}"
        );
        *last = obj;
    }
}

fn kkt_violation(beta: &[f64], grad: &[f64], thresholds: &[f64], live: &[bool]) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..beta.len() {
        if !live[j] {
            continue;
        }
        let v = if beta[j] != 0.0 {
            (grad[j] - thresholds[j] * beta[j].signum()).abs()
        } else {
            (grad[j].abs() - thresholds[j]).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Largest `lambda` with all penalized coefficients zero:
/// `max_j |x_j' r| / (rows * w_j)` after residualizing `y` on the intercept
/// and the unpenalized columns.
pub fn lambda_max(x: &DMatrix<f64>, y: &DVector<f64>, w: &[f64]) -> Result<f64> {
    GramCache::new(x, y)?.lambda_max(w)
}

pub fn fit_path(problem: &LassoProblem<'_>) -> Result<LassoPath> {
    GramCache::new(problem.x, problem.y)?.fit_path(
        problem.weights,
        &problem.lambdas,
        problem.tol,
        problem.max_iter,
    )
}
