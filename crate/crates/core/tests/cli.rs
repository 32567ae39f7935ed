use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use srlpac::cli::RunConfig;
use srlpac::model_file::ModelFile;

fn srlpac(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srlpac"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = srlpac(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with(dir: &Path, args: &[&str], code: i32) -> String {
    let out = srlpac(dir, args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stderr).unwrap()
}

fn simulate(dir: &Path) {
    ok(
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
            "3",
            "--n",
            "800",
            "--seed",
            "5",
            "--exog",
            "holiday:bernoulli:0.1:-1.5",
            "-o",
            "series.csv",
        ],
    );
}

#[test]
fn full_pipeline_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    simulate(d);
    let csv = fs::read_to_string(d.join("series.csv")).unwrap();
    assert!(csv.starts_with("t,y,holiday\n"));
    assert_eq!(csv.lines().count(), 801);

    ok(
        d,
        &[
            "pacf",
            "-i",
            "series.csv",
            "--max-lag",
            "24",
            "-o",
            "pacf.csv",
        ],
    );
    let pacf = fs::read_to_string(d.join("pacf.csv")).unwrap();
    assert!(pacf.starts_with("lag,acf,pacf,conf_band\n"));
    assert_eq!(pacf.lines().count(), 25);

    let summary = ok(
        d,
        &[
            "fit",
            "-i",
            "series.csv",
            "--exog-columns",
            "holiday",
            "--p-star",
            "24",
            "-o",
            "fit",
        ],
    );
    assert!(summary.contains("active lags"));
    for f in [
        "model.json",
        "ic_table.csv",
        "weights.csv",
        "coefficients.csv",
        "summary.txt",
    ] {
        assert!(d.join("fit").join(f).exists(), "missing {f}");
    }
    let ic = fs::read_to_string(d.join("fit/ic_table.csv")).unwrap();
    assert_eq!(ic.lines().count(), 1 + 7 * 101);

    let model = ModelFile::load(&d.join("fit/model.json")).unwrap();
    assert_eq!(model.n_train, 720);
    assert_eq!(model.fit.exog_coefs.len(), 1);
    assert!(model.fit.active_lags.contains(&1));

    let fc = ok(
        d,
        &[
            "forecast",
            "--model",
            "fit/model.json",
            "-i",
            "series.csv",
            "--exog-future",
            "series.csv",
            "--horizon",
            "4",
        ],
    );
    assert_eq!(fc.lines().count(), 5);
    assert!(fc.starts_with("step,forecast\n"));

    let table = ok(
        d,
        &[
            "evaluate",
            "--model",
            "fit/model.json",
            "-i",
            "series.csv",
            "-o",
            "eval",
        ],
    );
    assert!(table.contains("one-step") && table.contains("rolling-sum"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("eval/report.json")).unwrap()).unwrap();
    let rmspe = report["one_step"]["rmspe"].as_f64().unwrap();
    assert!(rmspe > 0.7 && rmspe < 1.4, "one-step rmspe {rmspe}");

    ok(
        d,
        &[
            "coefficients",
            "--model",
            "fit/model.json",
            "-i",
            "series.csv",
            "-o",
            "coef.csv",
        ],
    );
    let coef = fs::read_to_string(d.join("coef.csv")).unwrap();
    assert!(coef.lines().any(|l| l.starts_with("holiday,")));
    assert!(coef.lines().any(|l| l.starts_with("(Intercept),")));
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        simulate(d);
        ok(
            d,
            &[
                "fit",
                "-i",
                "series.csv",
                "--exog-columns",
                "holiday",
                "--p-star",
                "24",
                "-o",
                "fit",
            ],
        );
    }
    for f in [
        "series.csv",
        "fit/model.json",
        "fit/ic_table.csv",
        "fit/weights.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn unknown_column_is_a_config_error_listing_columns() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path());
    let err = fails_with(
        tmp.path(),
        &[
            "fit",
            "-i",
            "series.csv",
            "--exog-columns",
            "promo",
            "-o",
            "fit",
        ],
        2,
    );
    assert!(
        err.contains("promo") && err.contains("t, y, holiday"),
        "{err}"
    );
    let err = fails_with(
        tmp.path(),
        &[
            "fit",
            "-i",
            "series.csv",
            "--value-column",
            "sales",
            "-o",
            "fit",
        ],
        2,
    );
    assert!(err.contains("sales"), "{err}");
}

#[test]
fn missing_values_are_rejected_with_their_row() {
    let tmp = tempfile::tempdir().unwrap();
    let mut body = String::from("t,y\n");
    for t in 0..100 {
        if t == 41 {
            body.push_str("42,NA\n");
        } else {
            body.push_str(&format!("{},{}\n", t + 1, (t as f64 * 0.7).sin()));
        }
    }
    fs::write(tmp.path().join("gap.csv"), body).unwrap();
    let err = fails_with(tmp.path(), &["fit", "-i", "gap.csv", "-o", "fit"], 3);
    assert!(
        err.contains("row 42") && err.contains("missing value"),
        "{err}"
    );
}

#[test]
fn full_training_fraction_disables_evaluation() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    simulate(d);
    let summary = ok(
        d,
        &[
            "fit",
            "-i",
            "series.csv",
            "--exog-columns",
            "holiday",
            "--p-star",
            "24",
            "--train-fraction",
            "1.0",
            "-o",
            "fit",
        ],
    );
    assert!(summary.contains("evaluation disabled"));
    fails_with(
        d,
        &[
            "evaluate",
            "--model",
            "fit/model.json",
            "-i",
            "series.csv",
            "-o",
            "eval",
        ],
        3,
    );
}

#[test]
fn bad_split_and_order_exit_with_code_4() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    simulate(d);
    fails_with(
        d,
        &[
            "fit",
            "-i",
            "series.csv",
            "--train-fraction",
            "1.5",
            "-o",
            "fit",
        ],
        4,
    );
    fails_with(
        d,
        &["fit", "-i", "series.csv", "--p-star", "5000", "-o", "fit"],
        4,
    );
}

#[test]
fn non_stationary_simulation_exits_with_code_5() {
    let tmp = tempfile::tempdir().unwrap();
    let err = fails_with(
        tmp.path(),
        &[
            "simulate", "--phi", "0.7", "--theta", "0.6", "--period", "4", "--n", "50", "-o",
            "x.csv",
        ],
        5,
    );
    assert!(err.contains("stationary"), "{err}");
}

#[test]
fn future_model_versions_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    simulate(d);
    ok(
        d,
        &[
            "fit",
            "-i",
            "series.csv",
            "--exog-columns",
            "holiday",
            "--p-star",
            "24",
            "-o",
            "fit",
        ],
    );
    let text = fs::read_to_string(d.join("fit/model.json")).unwrap();
    fs::write(
        d.join("v2.json"),
        text.replace("\"format_version\": \"1.0\"", "\"format_version\": \"2.0\""),
    )
    .unwrap();
    fails_with(
        d,
        &[
            "forecast",
            "--model",
            "v2.json",
            "-i",
            "series.csv",
            "--exog-future",
            "series.csv",
        ],
        6,
    );
    fs::write(d.join("junk.json"), "{\"format\": \"something-else\"}").unwrap();
    fails_with(
        d,
        &["forecast", "--model", "junk.json", "-i", "series.csv"],
        6,
    );
}

#[test]
fn missing_files_exit_with_code_7() {
    let tmp = tempfile::tempdir().unwrap();
    fails_with(tmp.path(), &["fit", "-i", "nowhere.csv", "-o", "fit"], 7);
}

#[test]
fn config_file_drives_the_fit_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    simulate(d);
    let cfg = RunConfig {
        input: Some("series.csv".into()),
        exog_columns: vec!["holiday".into()],
        p_star: Some(24),
        n_lambda: 21,
        gammas: vec![0.0, 1.0],
        output_dir: "from-config".into(),
        ..RunConfig::default()
    };
    fs::write(d.join("run.json"), cfg.to_canonical_json()).unwrap();
    ok(d, &["--config", "run.json", "fit"]);
    let ic = fs::read_to_string(d.join("from-config/ic_table.csv")).unwrap();
    assert_eq!(ic.lines().count(), 1 + 2 * 21);
    let model = ModelFile::load(&d.join("from-config/model.json")).unwrap();
    assert_eq!(model.config, cfg);

    ok(
        d,
        &[
            "--config",
            "run.json",
            "fit",
            "--n-lambda",
            "11",
            "-o",
            "override",
        ],
    );
    let ic = fs::read_to_string(d.join("override/ic_table.csv")).unwrap();
    assert_eq!(ic.lines().count(), 1 + 2 * 11);

    fs::write(d.join("bad.json"), "{\"p_starr\": 3}").unwrap();
    fails_with(d, &["--config", "bad.json", "fit"], 2);
    fs::write(
        d.join("nozero.json"),
        "{\"input\": \"series.csv\", \"gammas\": [1.0, 2.0]}",
    )
    .unwrap();
    fails_with(d, &["--config", "nozero.json", "fit"], 2);
}

#[test]
fn canonical_config_round_trips() {
    let cfg = RunConfig {
        exog_columns: vec!["a".into(), "b".into()],
        factor_columns: vec!["month:jan".into()],
        m: Some(24.0),
        seed: 99,
        ..RunConfig::default()
    };
    let text = cfg.to_canonical_json();
    let back = RunConfig::from_json(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_canonical_json(), text);
    assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
}
