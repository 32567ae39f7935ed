//! Recursive 1- to 10-step forecasts from every test origin and the accuracy
//! of their 10-step cumulative sums, next to plain one-step accuracy.

use srlpac::prelude::*;

fn main() -> Result<()> {
    let spec = SarSpec::sar(vec![0.6], vec![0.25], 24, 2.0, 5).with_intercept(8.0);
    let ts = simulate_sar(&spec, 3000)?;
    let (train, _) = split_train_test(&ts, 0.8)?;
    let fit = fit_srl(
        &train,
        48,
        WeightScheme::Pacf,
        &TuningGrid::default(),
        ExoMode::Unpenalized,
    )?;

    let h = 10;
    let fc = forecast_matrix(&fit, &ts, train.n(), h)?;
    let o = fc.origins[0];
    println!("forecasts from origin {o}:");
    for (s, (p, a)) in fc.point_forecasts[0].iter().zip(&fc.actuals[0]).enumerate() {
        println!("  h={:>2}  predicted {p:>8.3}  actual {a:>8.3}", s + 1);
    }

    let step_rmspe: Vec<f64> = (0..h)
        .map(|s| {
            let p: Vec<f64> = fc.point_forecasts.iter().map(|f| f[s]).collect();
            let a: Vec<f64> = fc.actuals.iter().map(|f| f[s]).collect();
            rmspe(&p, &a)
        })
        .collect::<Result<_>>()?;
    println!(
        "rmspe by horizon: {:?}",
        step_rmspe
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
    );

    let sums = rolling_sum_forecast(&fit, &ts, train.n(), h)?;
    let rs = AccuracyReport::compute(&sums.predicted, &sums.actual)?;
    let one = one_step_rolling(&fit, &ts, train.n())?;
    let os = AccuracyReport::compute(&one.predicted, &one.actual)?;
    println!(
        "one-step:    n={:>4} rmspe {:.3} mape {:.2}%",
        os.n_star, os.rmspe, os.mape
    );
    println!(
        "{h}-step sum: n={:>4} rmspe {:.3} mape {:.2}%",
        rs.n_star, rs.rmspe, rs.mape
    );
    Ok(())
}
