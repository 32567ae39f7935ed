//! Synthetic seasonal autoregressive series with optional exogenous effects.
//!
//! The generating model is additive:
//!
//! ```text
//! y_t = b0 + sum_j phi_j y_{t-j} + sum_j theta_j y_{t-jm} + sum_e c_e x_{e,t} + eps_t
//! ```
//!
//! with `eps_t ~ N(0, sigma^2)`. Exogenous effects enter inside the recursion,
//! so the series is exactly an ARX process.

use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};
use crate::series::TimeSeries;

/// How an exogenous covariate is drawn at each time step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExogGenerator {
    /// 0/1 indicator, 1 with probability `p` (holiday-like).
    Bernoulli { p: f64 },
    /// Independent `N(0, sd^2)` draws.
    Gaussian { sd: f64 },
    /// Deterministic `amplitude * sin(2 pi t / period)`.
    Sinusoid { period: f64, amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExogEffect {
    pub name: String,
    pub generator: ExogGenerator,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SarSpec {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub m: usize,
    pub beta0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub exog_effects: Vec<ExogEffect>,
    pub seed: u64,
    /// Defaults to `10 * (p + P * m)`.
    #[serde(default)]
    pub burn_in: Option<usize>,
}

impl SarSpec {
    /// Zero-intercept AR(p).
    pub fn ar(phi: Vec<f64>, sigma: f64, seed: u64) -> Self {
        Self {
            phi,
            theta: Vec::new(),
            m: 1,
            beta0: 0.0,
            sigma,
            exog_effects: Vec::new(),
            seed,
            burn_in: None,
        }
    }

    /// Zero-intercept additive seasonal AR.
    pub fn sar(phi: Vec<f64>, theta: Vec<f64>, m: usize, sigma: f64, seed: u64) -> Self {
        Self {
            m,
            theta,
            ..Self::ar(phi, sigma, seed)
        }
    }

    pub fn with_intercept(mut self, beta0: f64) -> Self {
        self.beta0 = beta0;
        self
    }

    pub fn with_exog(mut self, effect: ExogEffect) -> Self {
        self.exog_effects.push(effect);
        self
    }

    pub fn max_lag(&self) -> usize {
        let seasonal = if self.theta.is_empty() {
            0
        } else {
            self.theta.len() * self.m
        };
        self.phi.len().max(seasonal)
    }

    /// Combined lag coefficients for lags `1..=max_lag`.
    pub fn lag_coefficients(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.max_lag()];
        for (j, &p) in self.phi.iter().enumerate() {
            c[j] += p;
        }
        for (j, &t) in self.theta.iter().enumerate() {
            c[(j + 1) * self.m - 1] += t;
        }
        c
    }

    /// Spectral radius of the companion matrix of the lag polynomial.
    pub fn spectral_radius(&self) -> f64 {
        let c = self.lag_coefficients();
        let d = c.len();
        if d == 0 {
            return 0.0;
        }
        if d == 1 {
            return c[0].abs();
        }
        let mut comp = DMatrix::zeros(d, d);
        for (j, &v) in c.iter().enumerate() {
            comp[(0, j)] = v;
        }
        for i in 1..d {
            comp[(i, i - 1)] = 1.0;
        }
        match Schur::try_new(comp.clone(), f64::EPSILON, 100 * d) {
            Some(schur) => schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
            None => power_radius(comp),
        }
    }

    /// Whether every root of the lag polynomial lies outside the unit circle,
    /// decided by stepping the coefficients down to partial autocorrelations.
    pub fn is_stationary(&self) -> bool {
        let mut phi = self.lag_coefficients();
        while let Some(&kappa) = phi.last() {
            if !(kappa.abs() < 1.0) {
                return false;
            }
            let k = phi.len();
            let denom = 1.0 - kappa * kappa;
            phi = (0..k - 1)
                .map(|j| (phi[j] + kappa * phi[k - 2 - j]) / denom)
                .collect();
        }
        true
    }

    fn burn_in_len(&self) -> usize {
        self.burn_in
            .unwrap_or(10 * (self.phi.len() + self.theta.len() * self.m))
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(SrlError::InvalidInput(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if !self.theta.is_empty() && self.m < 1 {
            return Err(SrlError::InvalidInput(
                "seasonal period must be >= 1".into(),
            ));
        }
        for e in &self.exog_effects {
            match e.generator {
                ExogGenerator::Bernoulli { p } if !(0.0..=1.0).contains(&p) => {
                    return Err(SrlError::InvalidInput(format!(
                        "Bernoulli probability for '{}' must lie in [0, 1]",
                        e.name
                    )))
                }
                ExogGenerator::Gaussian { sd } if !(sd >= 0.0) => {
                    return Err(SrlError::InvalidInput(format!(
                        "sd for '{}' must be >= 0",
                        e.name
                    )))
                }
                ExogGenerator::Sinusoid { period, .. } if !(period > 0.0) => {
                    return Err(SrlError::InvalidInput(format!(
                        "period for '{}' must be > 0",
                        e.name
                    )))
                }
                _ => {}
            }
        }
        if !self.is_stationary() {
            return Err(SrlError::NonStationary {
                spectral_radius: self.spectral_radius(),
            });
        }
        Ok(())
    }
}

/// `||C^(2^s)||^(1 / 2^s)` by repeated squaring with rescaling.
fn power_radius(mut c: DMatrix<f64>) -> f64 {
    let mut log_scale = 0.0;
    let mut steps = 1.0;
    for _ in 0..40 {
        let norm = c.norm();
        if norm == 0.0 {
            return 0.0;
        }
        c /= norm;
        log_scale += norm.ln() / steps;
        c = &c * &c;
        steps *= 2.0;
    }
    (log_scale + c.norm().ln() / steps).exp()
}

fn draw_exog<R: Rng>(gen: &ExogGenerator, t: usize, rng: &mut R) -> f64 {
    match *gen {
        ExogGenerator::Bernoulli { p } => {
            if Bernoulli::new(p)
                .expect("validated probability")
                .sample(rng)
            {
                1.0
            } else {
                0.0
            }
        }
        ExogGenerator::Gaussian { sd } => {
            let z: f64 = rng.sample(StandardNormal);
            sd * z
        }
        ExogGenerator::Sinusoid { period, amplitude } => {
            amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin()
        }
    }
}

/// Draws `n` observations after discarding the burn-in. The same spec and
/// seed always produce the same series.
pub fn simulate_sar(spec: &SarSpec, n: usize) -> Result<TimeSeries> {
    spec.validate()?;
    if n < 2 {
        return Err(SrlError::InvalidInput(
            "simulation length must be >= 2".into(),
        ));
    }
    let coefs = spec.lag_coefficients();
    let p = coefs.len();
    let burn = spec.burn_in_len();
    let total = burn + n;
    let k = spec.exog_effects.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let sum: f64 = coefs.iter().sum();
    let mean = spec.beta0 / (1.0 - sum);
    let mut y = vec![mean; p + total];
    let mut exog = DMatrix::zeros(n, k);
    let mut row = vec![0.0; k];

    for t in 0..total {
        for (e, effect) in spec.exog_effects.iter().enumerate() {
            row[e] = draw_exog(&effect.generator, t, &mut rng);
        }
        let eps: f64 = rng.sample(StandardNormal);
        let idx = p + t;
        let mut v = spec.beta0 + spec.sigma * eps;
        for (j, &c) in coefs.iter().enumerate() {
            if c != 0.0 {
                v += c * y[idx - j - 1];
            }
        }
        for (e, effect) in spec.exog_effects.iter().enumerate() {
            v += effect.coef * row[e];
        }
        y[idx] = v;
        if t >= burn {
            for e in 0..k {
                exog[(t - burn, e)] = row[e];
            }
        }
    }
    let values = y[p + burn..].to_vec();
    if k == 0 {
        TimeSeries::new(values)
    } else {
        let names = spec.exog_effects.iter().map(|e| e.name.clone()).collect();
        TimeSeries::with_exog(values, exog, names)
    }
}
