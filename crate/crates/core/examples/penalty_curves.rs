//! Penalty multipliers per lag under each weighting scheme, normalized to
//! mean one, for a series with hourly data and a daily cycle.

use srlpac::penalty::{assemble_weights, endo_weights};
use srlpac::prelude::*;

fn main() -> Result<()> {
    let p_star = 72;
    let spec = SarSpec::sar(vec![0.5], vec![0.35], 24, 1.0, 11);
    let ts = simulate_sar(&spec, 5000)?;
    let est = pacf(ts.values(), p_star)?;

    let schemes = [
        ("uniform", WeightScheme::Uniform),
        (
            "local",
            WeightScheme::Local {
                gamma_l: 1.0,
                c: 0.5,
            },
        ),
        (
            "seasonal",
            WeightScheme::Seasonal {
                gamma_s: 1.0,
                m: 24.0,
            },
        ),
        (
            "combined",
            WeightScheme::Combined {
                gamma_l: 1.0,
                gamma_s: 1.0,
                m: 24.0,
                c: 0.5,
            },
        ),
        ("pacf", WeightScheme::Pacf),
    ];
    let mut curves = Vec::new();
    for (name, scheme) in schemes {
        let endo = endo_weights(&scheme, p_star, Some(&est), 1.0, 1e6)?;
        let w =
            assemble_weights(endo, 0, ExoMode::Unpenalized, None, scheme, 1.0, 1e6)?.normalized();
        curves.push((name, w));
    }

    print!("{:>4}", "lag");
    for (name, _) in &curves {
        print!(" {name:>10}");
    }
    println!();
    for j in [1, 2, 3, 6, 12, 23, 24, 25, 36, 48, 60, 72] {
        print!("{j:>4}");
        for (_, w) in &curves {
            print!(" {:>10.4}", w.endo()[j - 1]);
        }
        println!();
    }
    Ok(())
}
