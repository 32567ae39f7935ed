//! A holiday indicator and a day-of-week factor enter unpenalized next to a
//! PACF-weighted lag block; their effects get confidence intervals with the
//! lag part held fixed as an offset. The holiday effect is -4 and the day
//! factor has no effect, so its intervals should mostly straddle zero.

use srlpac::prelude::*;

fn main() -> Result<()> {
    let n = 2100;
    let spec = SarSpec::sar(vec![0.4], vec![0.3], 7, 1.0, 21)
        .with_intercept(20.0)
        .with_exog(ExogEffect {
            name: "holiday".into(),
            generator: ExogGenerator::Bernoulli { p: 0.05 },
            coef: -4.0,
        });
    let sim = simulate_sar(&spec, n)?;

    let days = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];
    let labels: Vec<String> = (0..n).map(|t| days[t % 7].to_string()).collect();
    let mut ts = sim;
    ts.add_categorical("day", &labels, "mon")?;

    let fit = fit_srl(
        &ts,
        28,
        WeightScheme::Pacf,
        &TuningGrid::default(),
        ExoMode::Unpenalized,
    )?;
    println!("active lags: {:?}", fit.active_lags);

    let table = infer_exogenous(&fit, &ts, 0.95)?;
    println!(
        "{:<14} {:>9} {:>9} {:>20}",
        "term", "estimate", "se", "95% interval"
    );
    for row in &table.rows {
        if row.baseline {
            println!("{:<14} {:>9} {:>9} {:>20}", row.term, "(base)", "", "");
        } else {
            println!(
                "{:<14} {:>9.3} {:>9.3}   [{:>7.3}, {:>7.3}]",
                row.term, row.estimate, row.std_error, row.ci_low, row.ci_high
            );
        }
    }
    println!(
        "residual sd {:.3} on {} rows",
        table.residual_sd, table.n_rows
    );
    Ok(())
}
