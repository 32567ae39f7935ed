//! Sample ACF and PACF of a simulated series, flagging lags outside the
//! approximate 2/sqrt(n) band.

use srlpac::prelude::*;

fn main() -> Result<()> {
    let spec = SarSpec::sar(vec![0.6, -0.2], vec![0.4], 7, 1.0, 3);
    let ts = simulate_sar(&spec, 1000)?;
    let res = pacf(ts.values(), 21)?;

    println!("band = ±{:.4}", res.conf_band);
    println!("{:>4} {:>9} {:>9}", "lag", "acf", "pacf");
    for j in 0..res.max_lag {
        let flag = if res.pacf[j].abs() > res.conf_band {
            "*"
        } else {
            ""
        };
        println!(
            "{:>4} {:>9.4} {:>9.4} {flag}",
            j + 1,
            res.acf[j],
            res.pacf[j]
        );
    }
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
