//! End to end without the command line: fit, save a model file, load it back
//! and score the test partition with the reloaded model.

use srlpac::cli::{run_evaluate, RunConfig};
use srlpac::model_file::ModelFile;
use srlpac::prelude::*;

fn main() -> Result<()> {
    let spec = SarSpec::sar(vec![0.5, 0.2], vec![0.2], 12, 1.0, 99).with_intercept(10.0);
    let ts = simulate_sar(&spec, 2400)?;

    let cfg = RunConfig {
        p_star: Some(36),
        train_fraction: 0.85,
        horizon: 6,
        ..RunConfig::default()
    };
    let (train, _) = split_train_test(&ts, cfg.train_fraction)?;
    let fit = fit_srl(
        &train,
        36,
        cfg.weight_scheme()?,
        &cfg.tuning_grid(),
        cfg.exo_mode,
    )?;

    let dir = std::env::temp_dir().join("srlpac-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("model.json");
    ModelFile::new(cfg.clone(), train.n(), ts.n(), fit).save(&path)?;
    println!("saved {}", path.display());

    let model = ModelFile::load(&path)?;
    let ev = run_evaluate(&model, &ts, cfg.horizon)?;
    let show = |label: &str, r: &AccuracyReport| {
        println!(
            "{label:<12} n={:<4} rmspe {:.4}  mae {:.4}  mape {:.3}%  r2 {:.4}",
            r.n_star, r.rmspe, r.mae, r.mape, r.r2
        )
    };
    show("one-step", &ev.one_step);
    if let Some(r) = &ev.rolling {
        show(&format!("{}-step sum", cfg.horizon), r);
    }
    Ok(())
}
