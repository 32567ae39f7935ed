//! Sparsity-ranked lasso for long autoregressive models.
//!
//! The fitting pipeline treats every lag up to `p_star` as a candidate
//! regressor, ranks them with per-lag penalty multipliers (by default the
//! inverse sample partial autocorrelation raised to a tuning exponent), and
//! tunes the exponent and the lasso penalty jointly with AICc or BIC.
//! Exogenous covariates may be left unpenalized, in which case their
//! coefficients admit classical confidence intervals.
//!
//! ```no_run
//! use srlpac::prelude::*;
//!
//! let spec = SarSpec::sar(vec![0.5], vec![0.3], 12, 1.0, 7);
//! let ts = simulate_sar(&spec, 4000).unwrap();
//! let (train, test) = split_train_test(&ts, 0.9).unwrap();
//! let fit = fit_srl(&train, 36, WeightScheme::Pacf, &TuningGrid::default(), ExoMode::Unpenalized)
//!     .unwrap();
//! println!("active lags: {:?}", fit.active_lags);
//! let eval = one_step_rolling(&fit, &ts, train.n()).unwrap();
//! println!("{:?}", AccuracyReport::compute(&eval.predicted, &eval.actual).unwrap());
//! # let _ = test;
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod forecast;
pub mod inference;
pub mod lasso;
pub mod model_file;
pub mod pacf;
pub mod penalty;
pub mod series;
pub mod simulate;
pub mod tuning;

pub use error::{Result, SrlError};

pub mod prelude {
    pub use crate::error::{Result, SrlError};
    pub use crate::forecast::{
        forecast_matrix, mae, mape, one_step_rolling, predict_recursive, r_squared, rmspe,
        rolling_sum_forecast, AccuracyReport, ForecastResult, OneStep, RollingSums,
    };
    pub use crate::inference::{infer_exogenous, CoefficientRow, CoefficientTable};
    pub use crate::lasso::{
        fit_path, lambda_max, soft_threshold, GramCache, LassoPath, LassoProblem,
    };
    pub use crate::pacf::{acf, pacf, PacfResult};
    pub use crate::penalty::{
        combined_psf, local_psf, pacf_weights, seasonal_psf, ExoMode, PenaltyWeights, WeightScheme,
    };
    pub use crate::series::{build_design, split_train_test, standardize, ArDesign, TimeSeries};
    pub use crate::simulate::{simulate_sar, ExogEffect, ExogGenerator, SarSpec};
    pub use crate::tuning::{aicc, bic, fit_srl, Criterion, IcRow, SrlFit, TuningGrid};
}
