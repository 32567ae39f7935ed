//! Simulate a monthly seasonal AR series, tune a PACF-weighted lasso with BIC
//! and compare the selected lags with the generating ones.
//!
//! cargo run --example simulate_and_fit -- [seed]

use srlpac::prelude::*;

fn main() -> Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let spec = SarSpec::sar(vec![0.5], vec![0.3], 12, 1.0, seed).with_intercept(2.0);
    let ts = simulate_sar(&spec, 4000)?;
    let (train, _) = split_train_test(&ts, 0.9)?;

    let grid = TuningGrid::default().with_criterion(Criterion::Bic);
    let fit = fit_srl(&train, 36, WeightScheme::Pacf, &grid, ExoMode::Unpenalized)?;

    println!("true lags: 1 (0.5), 12 (0.3)");
    println!(
        "selected gamma = {}, lambda = {:.5}, df = {}",
        fit.gamma_opt, fit.lambda_opt, fit.df
    );
    for &j in &fit.active_lags {
        println!("  lag {j:>2}: {:+.4}", fit.lag_coefs[j - 1]);
    }
    println!("intercept: {:.4}", fit.intercept);

    let eval = one_step_rolling(&fit, &ts, train.n())?;
    let report = AccuracyReport::compute(&eval.predicted, &eval.actual)?;
    println!(
        "test rmspe {:.4}, mae {:.4}, r2 {:.4}",
        report.rmspe, report.mae, report.r2
    );
    Ok(())
}
