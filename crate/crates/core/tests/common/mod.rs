//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, q, |_, _| rng.sample(StandardNormal))
}

/// `y = X b + noise` with the first `s` entries of `b` nonzero.
pub fn sparse_response(
    rng: &mut ChaCha8Rng,
    x: &DMatrix<f64>,
    s: usize,
    noise: f64,
) -> DVector<f64> {
    let q = x.ncols();
    let mut b = DVector::zeros(q);
    for j in 0..s.min(q) {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        b[j] = sign * rng.gen_range(0.5..2.0);
    }
    let e = DVector::from_fn(x.nrows(), |_, _| {
        noise * rng.sample::<f64, _>(StandardNormal)
    });
    x * b + e + DVector::from_element(x.nrows(), 3.0)
}

/// Largest violation of the weighted-lasso optimality conditions for
/// `(1/2r)||y - b0 - Xb||^2 + lambda sum w_j |b_j|`, including the intercept
/// stationarity condition.
pub fn kkt_violation(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
    lambda: f64,
    b0: f64,
    beta: &[f64],
) -> f64 {
    let r = x.nrows() as f64;
    let b = DVector::from_column_slice(beta);
    let res = y - x * b - DVector::from_element(x.nrows(), b0);
    let mut worst = (res.sum() / r).abs();
    for j in 0..x.ncols() {
        let g = x.column(j).dot(&res) / r;
        let v = if beta[j] != 0.0 {
            (g - lambda * w[j] * beta[j].signum()).abs()
        } else {
            (g.abs() - lambda * w[j]).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Plain residual-updating coordinate descent, run to a very tight
/// tolerance. Returns `(intercept, beta)` for each lambda.
pub fn reference_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
    lambdas: &[f64],
) -> Vec<(f64, Vec<f64>)> {
    let (r, q) = x.shape();
    let rf = r as f64;
    let means: Vec<f64> = (0..q).map(|j| x.column(j).mean()).collect();
    let mut xc = x.clone();
    for j in 0..q {
        for i in 0..r {
            xc[(i, j)] -= means[j];
        }
    }
    let ym = y.mean();
    let norms: Vec<f64> = (0..q).map(|j| xc.column(j).norm_squared() / rf).collect();
    let mut beta = vec![0.0; q];
    let mut res = y.map(|v| v - ym);
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        for _ in 0..200_000 {
            let mut delta: f64 = 0.0;
            for j in 0..q {
                let z = xc.column(j).dot(&res) / rf + norms[j] * beta[j];
                let t = lam * w[j];
                let nb = if z > t {
                    (z - t) / norms[j]
                } else if z < -t {
                    (z + t) / norms[j]
                } else {
                    0.0
                };
                let d = nb - beta[j];
                if d != 0.0 {
                    res.axpy(-d, &xc.column(j), 1.0);
                    beta[j] = nb;
                    delta = delta.max(d.abs());
                }
            }
            if delta < 1e-14 {
                break;
            }
        }
        let b0 = ym - means.iter().zip(&beta).map(|(m, b)| m * b).sum::<f64>();
        out.push((b0, beta.clone()));
    }
    out
}

/// Sample autocorrelations with the divisor-n autocovariance.
pub fn sample_acf(v: &[f64], max_lag: usize) -> Vec<f64> {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let c = |k: usize| -> f64 {
        (k..n)
            .map(|t| (v[t] - mean) * (v[t - k] - mean))
            .sum::<f64>()
            / n as f64
    };
    let c0 = c(0);
    (0..=max_lag).map(|k| c(k) / c0).collect()
}

/// Last coefficient of the Yule-Walker AR(j) fit for `j = 1..=max_lag`,
/// each from a fresh solve of the Toeplitz normal equations.
pub fn yule_walker_pacf(v: &[f64], max_lag: usize) -> Vec<f64> {
    let rho = sample_acf(v, max_lag);
    (1..=max_lag)
        .map(|j| {
            let a = DMatrix::from_fn(j, j, |r, c| rho[r.abs_diff(c)]);
            let b = DVector::from_fn(j, |i, _| rho[i + 1]);
            let phi = a.lu().solve(&b).expect("Toeplitz system is nonsingular");
            phi[j - 1]
        })
        .collect()
}

/// Centered columns with `X'X / r = I`.
pub fn orthonormal_design(rng: &mut ChaCha8Rng, r: usize, q: usize) -> DMatrix<f64> {
    let mut x = gaussian_matrix(rng, r, q);
    for j in 0..q {
        let m = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-m);
    }
    let qr = x.qr();
    qr.q() * (r as f64).sqrt()
}
