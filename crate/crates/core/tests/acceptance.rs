//! Acceptance checks. Runs as a plain binary so every criterion reports a
//! single PASS/FAIL line even when captured output is hidden.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use rand::Rng;
use srlpac::prelude::*;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn kkt_random_problems() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for seed in 0..50 {
        let mut g = rng(1000 + seed);
        let x = gaussian_matrix(&mut g, 200, 50);
        let y = sparse_response(&mut g, &x, 8, 1.0);
        let mut w: Vec<f64> = (0..50).map(|_| g.gen_range(0.2..3.0)).collect();
        for j in 0..5 {
            w[j * 10 + 3] = 0.0;
        }
        let problem = LassoProblem::with_default_grid(&x, &y, &w).unwrap();
        let path = fit_path(&problem).unwrap();
        for l in 0..path.len() {
            let v = kkt_violation(
                &x,
                &y,
                &w,
                path.lambdas[l],
                path.intercepts[l],
                &path.betas[l],
            );
            worst = worst.max(v);
            points += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 30.0,
        format!("{points} path points, max violation {worst:.2e}, {secs:.2} s"),
    )
}

fn orthonormal_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut g = rng(2000 + seed);
        let (r, q) = (200, 20);
        let x = orthonormal_design(&mut g, r, q);
        let y = sparse_response(&mut g, &x, 5, 1.0);
        let w: Vec<f64> = (0..q).map(|_| g.gen_range(0.3..2.5)).collect();
        let problem = LassoProblem::with_default_grid(&x, &y, &w).unwrap();
        let path = fit_path(&problem).unwrap();
        let xty: Vec<f64> = (0..q).map(|j| x.column(j).dot(&y) / r as f64).collect();
        for l in 0..path.len() {
            for j in 0..q {
                let oracle = soft_threshold(xty[j], path.lambdas[l] * w[j]);
                worst = worst.max((path.betas[l][j] - oracle).abs());
            }
        }
    }
    outcome(worst <= 1e-8, format!("max deviation {worst:.2e}"))
}

fn ordinary_lasso_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_ref_kkt: f64 = 0.0;
    for seed in 0..10 {
        let mut g = rng(3000 + seed);
        let x = gaussian_matrix(&mut g, 120, 30);
        let y = sparse_response(&mut g, &x, 6, 1.5);
        let w = vec![1.0; 30];
        let problem = LassoProblem::with_default_grid(&x, &y, &w).unwrap();
        let path = fit_path(&problem).unwrap();
        let reference = reference_lasso(&x, &y, &w, &path.lambdas);
        for (l, (b0, beta)) in reference.iter().enumerate() {
            worst_ref_kkt =
                worst_ref_kkt.max(kkt_violation(&x, &y, &w, path.lambdas[l], *b0, beta));
            for (a, b) in path.betas[l].iter().zip(beta) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(
        worst <= 1e-6 && worst_ref_kkt <= 1e-9,
        format!("max deviation {worst:.2e} (reference KKT {worst_ref_kkt:.1e})"),
    )
}

fn pacf_oracle() -> Outcome {
    let spec = SarSpec::sar(vec![0.4, -0.2], vec![0.3], 7, 1.0, 4242);
    let ts = simulate_sar(&spec, 500).unwrap();
    let got = pacf(ts.values(), 30).unwrap();
    let oracle = yule_walker_pacf(ts.values(), 30);
    let worst = got
        .pacf
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-8, format!("30 lags, max deviation {worst:.2e}"))
}

struct SeedRun {
    recovered: bool,
    secs: f64,
    ratio: f64,
}

fn order_recovery_runs() -> Vec<SeedRun> {
    let grid = TuningGrid::default().with_criterion(Criterion::Bic);
    (0..20)
        .map(|seed| {
            let spec = SarSpec::sar(vec![0.5], vec![0.3], 12, 1.0, seed);
            let ts = simulate_sar(&spec, 4000).unwrap();
            let start = Instant::now();
            let (train, _) = split_train_test(&ts, 0.9).unwrap();
            let fit = fit_srl(&train, 36, WeightScheme::Pacf, &grid, ExoMode::Unpenalized).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let lags = &fit.active_lags;
            let seasonal = lags.iter().any(|l| (11..=13).contains(l));
            let spurious = lags
                .iter()
                .filter(|l| !matches!(l, 1 | 11 | 12 | 13))
                .count();
            let recovered = lags.contains(&1) && seasonal && spurious <= 5;

            let eval = one_step_rolling(&fit, &ts, train.n()).unwrap();
            let y = ts.values();
            let oracle: Vec<f64> = eval
                .index
                .iter()
                .map(|&t| 0.5 * y[t - 1] + 0.3 * y[t - 12])
                .collect();
            let ratio = rmspe(&eval.predicted, &eval.actual).unwrap()
                / rmspe(&oracle, &eval.actual).unwrap();
            SeedRun {
                recovered,
                secs,
                ratio,
            }
        })
        .collect()
}

fn order_recovery(runs: &[SeedRun]) -> Outcome {
    let hits = runs.iter().filter(|r| r.recovered).count();
    let slowest = runs.iter().map(|r| r.secs).fold(0.0, f64::max);
    outcome(
        hits >= 18 && slowest < 10.0,
        format!("{hits}/20 seeds recovered, slowest fit {slowest:.2} s"),
    )
}

fn forecast_efficiency(runs: &[SeedRun]) -> Outcome {
    let worst = runs.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mean = runs.iter().map(|r| r.ratio).sum::<f64>() / runs.len() as f64;
    outcome(
        worst <= 1.05,
        format!("RMSPE ratio to true-coefficient model: mean {mean:.4}, worst {worst:.4}"),
    )
}

fn inference_coverage() -> Outcome {
    let delta = -1.5;
    let mut covered = 0;
    let reps = 200;
    for rep in 0..reps {
        let spec = SarSpec::sar(vec![0.5], vec![0.3], 12, 1.0, 5000 + rep)
            .with_intercept(5.0)
            .with_exog(ExogEffect {
                name: "holiday".into(),
                generator: ExogGenerator::Bernoulli { p: 0.1 },
                coef: delta,
            });
        let ts = simulate_sar(&spec, 2000).unwrap();
        let fit = fit_srl(
            &ts,
            36,
            WeightScheme::Pacf,
            &TuningGrid::default(),
            ExoMode::Unpenalized,
        )
        .unwrap();
        let table = infer_exogenous(&fit, &ts, 0.95).unwrap();
        let row = table.get("holiday").unwrap();
        if row.ci_low <= delta && delta <= row.ci_high {
            covered += 1;
        }
    }
    let rate = covered as f64 / reps as f64;
    outcome(
        (0.88..=0.99).contains(&rate),
        format!("{covered}/{reps} intervals cover the effect ({rate:.3})"),
    )
}

fn metric_identities() -> Outcome {
    let actual = [1.0, 2.0, 3.0];
    let flat = [2.0, 2.0, 2.0];
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let mut ok = close(rmspe(&flat, &actual).unwrap(), (2.0f64 / 3.0).sqrt())
        && close(mae(&flat, &actual).unwrap(), 2.0 / 3.0)
        && close(mape(&flat, &actual).unwrap(), 100.0 * 2.0 / 6.0)
        && close(r_squared(&[3.0, 2.0, 1.0], &actual).unwrap(), -3.0)
        && close(r_squared(&flat, &actual).unwrap(), 0.0)
        && close(r_squared(&actual, &actual).unwrap(), 1.0)
        && rmspe(&actual, &actual).unwrap() == 0.0
        && close(rmspe(&[1.5, 2.5, 3.5], &actual).unwrap(), 0.5);

    let mut g = rng(8000);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..1000 {
        let n = g.gen_range(1..60);
        let a: Vec<f64> = (0..n).map(|_| g.gen_range(0.5..100.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| g.gen_range(-20.0..120.0)).collect();
        let (e2, e1, pct) = (
            rmspe(&p, &a).unwrap(),
            mae(&p, &a).unwrap(),
            mape(&p, &a).unwrap(),
        );
        let ybar = a.iter().sum::<f64>() / n as f64;
        ok &= e1 <= e2 * (1.0 + 1e-12);
        worst_gap = worst_gap.max((pct - 100.0 * e1 / ybar).abs() / pct.max(1.0));
    }
    ok &= worst_gap <= 1e-12;
    outcome(
        ok,
        format!("hand examples exact, 1000 random vectors, max mape gap {worst_gap:.1e}"),
    )
}

fn scale_sanity() -> Outcome {
    let spec = SarSpec::sar(vec![0.5], vec![0.3], 168, 1.0, 11).with_intercept(10.0);
    let ts = simulate_sar(&spec, 40_000).unwrap();
    let start = Instant::now();
    let fit = fit_srl(
        &ts,
        840,
        WeightScheme::Pacf,
        &TuningGrid::default(),
        ExoMode::Unpenalized,
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let cells = fit.ic_table.len();
    outcome(
        secs < 600.0 && cells == 7 * 101,
        format!("{cells} (gamma, lambda) fits at p* = 840 in {secs:.1} s"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_srlpac"))
        .current_dir(dir)
        .args(args)
        .stdout(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

/// Same relative paths in both runs, so the recorded config is identical.
fn pipeline(dir: &Path) -> bool {
    run_cli(
        dir,
        &[
            "simulate",
            "--phi",
            "0.5",
            "--theta",
            "0.3",
            "--period",
            "12",
            "--beta0",
            "4",
            "--n",
            "1500",
            "--seed",
            "21",
            "--exog",
            "holiday:bernoulli:0.1:-1.5",
            "-o",
            "series.csv",
        ],
    ) && run_cli(
        dir,
        &[
            "fit",
            "-i",
            "series.csv",
            "--exog-columns",
            "holiday",
            "--p-star",
            "36",
            "--seed",
            "21",
            "-o",
            "fit",
        ],
    ) && run_cli(
        dir,
        &[
            "evaluate",
            "--model",
            "fit/model.json",
            "-i",
            "series.csv",
            "-o",
            "eval",
        ],
    )
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    if !(pipeline(a.path()) && pipeline(b.path())) {
        return outcome(false, "pipeline failed to run".into());
    }
    let files = [
        "series.csv",
        "fit/model.json",
        "fit/ic_table.csv",
        "fit/weights.csv",
        "fit/coefficients.csv",
        "eval/metrics_one_step.csv",
        "eval/metrics_rolling_sum.csv",
        "eval/predictions_one_step.csv",
        "eval/predictions_rolling_sum.csv",
        "eval/report.json",
    ];
    let differing: Vec<&str> = files
        .iter()
        .copied()
        .filter(|f| {
            std::fs::read(a.path().join(f)).ok() != std::fs::read(b.path().join(f)).ok()
                || !a.path().join(f).exists()
        })
        .collect();
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} artifacts byte-identical across two runs", files.len())
        } else {
            format!("differing or missing: {differing:?}")
        },
    )
}

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

fn main() -> ExitCode {
    let runs = order_recovery_runs();
    let checks: Vec<(&str, Check)> = vec![
        ("1 solver KKT", Box::new(kkt_random_problems)),
        ("2 orthonormal oracle", Box::new(orthonormal_oracle)),
        (
            "3 ordinary lasso reduction",
            Box::new(ordinary_lasso_reduction),
        ),
        ("4 PACF oracle", Box::new(pacf_oracle)),
        ("5 order recovery", Box::new(|| order_recovery(&runs))),
        (
            "6 forecast efficiency",
            Box::new(|| forecast_efficiency(&runs)),
        ),
        ("7 inference coverage", Box::new(inference_coverage)),
        ("8 metric identities", Box::new(metric_identities)),
        ("9 scale sanity", Box::new(scale_sanity)),
        ("10 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
