//! Per-column penalty multipliers.
//!
//! Weights are objective multipliers: the lasso minimizes
//! `loss + lambda * sum_j w_j |beta_j|`, so `w_j = 0` leaves column `j`
//! unpenalized and larger values demand more evidence before a column enters.
//! (Tools that instead speak of "penalty factors" use the reciprocal, where an
//! infinite factor means unpenalized.)

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};
use crate::pacf::PacfResult;

pub const DEFAULT_CAP: f64 = 1e6;
pub const DEFAULT_LOCALITY_C: f64 = 0.5;

/// How lag columns are weighted before the tuning exponent is applied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    Uniform,
    Local {
        gamma_l: f64,
        c: f64,
    },
    Seasonal {
        gamma_s: f64,
        m: f64,
    },
    Combined {
        gamma_l: f64,
        gamma_s: f64,
        m: f64,
        c: f64,
    },
    /// `(1 / |pacf_j|)`, the data-driven ranking.
    Pacf,
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::Local { .. } => "local",
            WeightScheme::Seasonal { .. } => "seasonal",
            WeightScheme::Combined { .. } => "combined",
            WeightScheme::Pacf => "pacf",
        }
    }

    pub fn needs_pacf(&self) -> bool {
        matches!(self, WeightScheme::Pacf)
    }
}

/// Treatment of exogenous columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExoMode {
    /// Multiplier 0; enables offset-based inference afterwards.
    #[default]
    Unpenalized,
    /// `(1 / |ols_j|)^gamma`, capped.
    Adaptive,
    /// Multiplier 1.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    /// One multiplier per design column: `p_star` lags then `k` exogenous.
    pub w: Vec<f64>,
    pub p_star: usize,
    pub scheme: WeightScheme,
    pub exo_mode: ExoMode,
    pub gamma: f64,
    pub cap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PenaltyWeights {
    pub fn endo(&self) -> &[f64] {
        &self.w[..self.p_star]
    }

    pub fn exo(&self) -> &[f64] {
        &self.w[self.p_star..]
    }

    /// Rescales penalized entries so their mean is 1. Zero entries stay zero.
    pub fn normalized(mut self) -> Self {
        let (sum, count) = self
            .w
            .iter()
            .filter(|&&v| v > 0.0)
            .fold((0.0, 0usize), |(s, c), &v| (s + v, c + 1));
        if count > 0 {
            let mean = sum / count as f64;
            self.w.iter_mut().for_each(|v| *v /= mean);
        }
        self
    }
}

/// `(j / p_star + c)^gamma_l`.
pub fn local_psf(j: usize, gamma_l: f64, p_star: usize, c: f64) -> f64 {
    debug_assert!(j >= 1 && j <= p_star);
    (j as f64 / p_star as f64 + c).powf(gamma_l)
}

/// `exp(-gamma_s * cos(2 pi j / m))`: smallest at multiples of `m`.
pub fn seasonal_psf(j: usize, gamma_s: f64, m: f64) -> f64 {
    (-gamma_s * (2.0 * PI * j as f64 / m).cos()).exp()
}

/// Product of the local and seasonal scaling functions.
pub fn combined_psf(j: usize, gamma_s: f64, gamma_l: f64, m: f64, p_star: usize, c: f64) -> f64 {
    (-gamma_s * (2.0 * PI * j as f64 / m).cos() + gamma_l * (j as f64 / p_star as f64 + c).ln())
        .exp()
}

fn capped_inverse_power(x: f64, gamma: f64, cap: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    let a = x.abs();
    if a == 0.0 {
        return cap;
    }
    // log domain avoids overflow for large gamma
    let lw = -gamma * a.ln();
    if lw >= cap.ln() {
        cap
    } else {
        lw.exp()
    }
}

/// `min((1 / |pacf_j|)^gamma, cap)` for every lag in `pacf`.
pub fn pacf_weights(pacf: &PacfResult, gamma: f64, cap: f64) -> Vec<f64> {
    pacf.pacf
        .iter()
        .map(|&p| capped_inverse_power(p, gamma, cap))
        .collect()
}

/// Lag weights for `scheme` raised to the tuning exponent `gamma`.
///
/// For the parametrized schemes `gamma` scales the scaling function's
/// strength (`f^gamma`); `gamma = 1` reproduces `f` itself.
pub fn endo_weights(
    scheme: &WeightScheme,
    p_star: usize,
    pacf: Option<&PacfResult>,
    gamma: f64,
    cap: f64,
) -> Result<Vec<f64>> {
    let base: Vec<f64> = match *scheme {
        WeightScheme::Uniform => return Ok(vec![1.0; p_star]),
        WeightScheme::Pacf => {
            let p = pacf.ok_or_else(|| {
                SrlError::InvalidInput("pacf scheme requires a PACF estimate".into())
            })?;
            if p.pacf.len() != p_star {
                return Err(SrlError::InvalidInput(format!(
                    "PACF has {} lags, expected {p_star}",
                    p.pacf.len()
                )));
            }
            return Ok(pacf_weights(p, gamma, cap));
        }
        WeightScheme::Local { gamma_l, c } => {
            check_psf_args(gamma_l, 0.0, None, c)?;
            (1..=p_star)
                .map(|j| local_psf(j, gamma_l, p_star, c))
                .collect()
        }
        WeightScheme::Seasonal { gamma_s, m } => {
            check_psf_args(0.0, gamma_s, Some(m), 1.0)?;
            (1..=p_star).map(|j| seasonal_psf(j, gamma_s, m)).collect()
        }
        WeightScheme::Combined {
            gamma_l,
            gamma_s,
            m,
            c,
        } => {
            check_psf_args(gamma_l, gamma_s, Some(m), c)?;
            (1..=p_star)
                .map(|j| combined_psf(j, gamma_s, gamma_l, m, p_star, c))
                .collect()
        }
    };
    Ok(base
        .into_iter()
        .map(|f| {
            if gamma == 0.0 {
                1.0
            } else {
                f.powf(gamma).min(cap)
            }
        })
        .collect())
}

fn check_psf_args(gamma_l: f64, gamma_s: f64, m: Option<f64>, c: f64) -> Result<()> {
    if !(gamma_l >= 0.0) || !(gamma_s >= 0.0) {
        return Err(SrlError::Config(
            "scaling strengths gamma_l and gamma_s must be >= 0".into(),
        ));
    }
    if !(c > 0.0) {
        return Err(SrlError::Config("locality constant c must be > 0".into()));
    }
    if let Some(m) = m {
        if !(m >= 2.0) {
            return Err(SrlError::Config(format!(
                "seasonal period m must be >= 2, got {m}"
            )));
        }
    }
    Ok(())
}

/// Concatenates lag weights with exogenous weights.
///
/// `exo_stats` holds first-stage OLS estimates and is only consulted in
/// adaptive mode.
#[allow(clippy::too_many_arguments)]
pub fn assemble_weights(
    endo: Vec<f64>,
    k: usize,
    exo_mode: ExoMode,
    exo_stats: Option<&[f64]>,
    scheme: WeightScheme,
    gamma: f64,
    cap: f64,
) -> Result<PenaltyWeights> {
    let p_star = endo.len();
    let mut w = endo;
    let mut warnings = Vec::new();
    match exo_mode {
        ExoMode::Unpenalized => w.extend(std::iter::repeat_n(0.0, k)),
        ExoMode::Uniform => w.extend(std::iter::repeat_n(1.0, k)),
        ExoMode::Adaptive => {
            let stats = exo_stats.ok_or_else(|| {
                SrlError::InvalidInput("adaptive exogenous weights need OLS estimates".into())
            })?;
            if stats.len() != k {
                return Err(SrlError::InvalidInput(format!(
                    "{} OLS estimates for {k} exogenous columns",
                    stats.len()
                )));
            }
            for (j, &b) in stats.iter().enumerate() {
                if b == 0.0 && gamma != 0.0 {
                    warnings.push(format!(
                        "exogenous column {j} has a zero OLS estimate; weight capped at {cap}"
                    ));
                }
                w.push(capped_inverse_power(b, gamma, cap));
            }
        }
    }
    Ok(PenaltyWeights {
        w,
        p_star,
        scheme,
        exo_mode,
        gamma,
        cap,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_pacf(p: Vec<f64>) -> PacfResult {
        let n = p.len();
        PacfResult {
            acf: p.clone(),
            pacf: p,
            max_lag: n,
            n: 100,
            conf_band: 0.2,
            warnings: vec![],
        }
    }

    #[test]
    fn local_examples() {
        for j in 1..=20 {
            assert_eq!(local_psf(j, 0.0, 20, 0.5), 1.0);
        }
        assert!((local_psf(10, 3.7, 20, 0.5) - 1.0).abs() < 1e-15);
        assert!((local_psf(20, 2.0, 20, 0.5) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn seasonal_examples() {
        let g = 1.3;
        assert!((seasonal_psf(12, g, 12.0) - (-g).exp()).abs() < 1e-12);
        assert!((seasonal_psf(6, g, 12.0) - g.exp()).abs() < 1e-12);
        assert_eq!(seasonal_psf(5, 0.0, 12.0), 1.0);
    }

    #[test]
    fn combined_examples() {
        assert_eq!(combined_psf(7, 0.0, 0.0, 12.0, 30, 0.5), 1.0);
        let v = combined_psf(12, 1.0, 1.0, 12.0, 12, 1.0);
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.7358).abs() < 1e-4);
    }

    #[test]
    fn pacf_weight_examples() {
        let p = fake_pacf(vec![0.5, -0.5, 1.0, 0.0, 1e-9]);
        assert_eq!(pacf_weights(&p, 0.0, 1e6), vec![1.0; 5]);
        let w = pacf_weights(&p, 2.0, 1e6);
        assert!((w[0] - 4.0).abs() < 1e-12);
        assert!((w[1] - 4.0).abs() < 1e-12);
        assert_eq!(w[2], 1.0);
        assert_eq!(w[3], 1e6);
        assert_eq!(w[4], 1e6);
        assert_eq!(pacf_weights(&p, 7.0, 1e6)[2], 1.0);
    }

    #[test]
    fn assemble_modes() {
        let endo = vec![1.0, 2.0, 3.0];
        let w = assemble_weights(
            endo.clone(),
            3,
            ExoMode::Unpenalized,
            None,
            WeightScheme::Pacf,
            1.0,
            1e6,
        )
        .unwrap();
        assert_eq!(w.endo(), endo.as_slice());
        assert_eq!(w.exo(), &[0.0, 0.0, 0.0]);
        let w = assemble_weights(
            endo.clone(),
            2,
            ExoMode::Uniform,
            None,
            WeightScheme::Pacf,
            1.0,
            1e6,
        )
        .unwrap();
        assert_eq!(w.exo(), &[1.0, 1.0]);
        assert!(assemble_weights(
            endo.clone(),
            2,
            ExoMode::Adaptive,
            None,
            WeightScheme::Pacf,
            1.0,
            1e6
        )
        .is_err());
        let w = assemble_weights(
            endo,
            2,
            ExoMode::Adaptive,
            Some(&[0.25, 0.0]),
            WeightScheme::Pacf,
            1.0,
            1e6,
        )
        .unwrap();
        assert!((w.exo()[0] - 4.0).abs() < 1e-12);
        assert_eq!(w.exo()[1], 1e6);
        assert_eq!(w.warnings.len(), 1);
    }

    #[test]
    fn normalization_keeps_zeros() {
        let w = PenaltyWeights {
            w: vec![1.0, 3.0, 0.0],
            p_star: 2,
            scheme: WeightScheme::Uniform,
            exo_mode: ExoMode::Unpenalized,
            gamma: 1.0,
            cap: 1e6,
            warnings: vec![],
        }
        .normalized();
        assert_eq!(w.w, vec![0.5, 1.5, 0.0]);
    }

    #[test]
    fn parametrized_gamma_zero_is_lasso() {
        for scheme in [
            WeightScheme::Local {
                gamma_l: 2.0,
                c: 0.5,
            },
            WeightScheme::Seasonal {
                gamma_s: 1.0,
                m: 12.0,
            },
            WeightScheme::Combined {
                gamma_l: 1.0,
                gamma_s: 1.0,
                m: 12.0,
                c: 0.5,
            },
        ] {
            let w = endo_weights(&scheme, 30, None, 0.0, 1e6).unwrap();
            assert!(w.iter().all(|&v| v == 1.0));
            let w1 = endo_weights(&scheme, 30, None, 1.0, 1e6).unwrap();
            assert!(
                (w1[11]
                    - match scheme {
                        WeightScheme::Local { gamma_l, c } => local_psf(12, gamma_l, 30, c),
                        WeightScheme::Seasonal { gamma_s, m } => seasonal_psf(12, gamma_s, m),
                        WeightScheme::Combined {
                            gamma_l,
                            gamma_s,
                            m,
                            c,
                        } => combined_psf(12, gamma_s, gamma_l, m, 30, c),
                        _ => unreachable!(),
                    })
                .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn bad_period_rejected() {
        let s = WeightScheme::Seasonal {
            gamma_s: 1.0,
            m: 1.0,
        };
        assert!(endo_weights(&s, 10, None, 1.0, 1e6).is_err());
    }
}
