//! Command-line surface: `simulate`, `pacf`, `fit`, `forecast`, `evaluate`
//! and `coefficients`.
//!
//! Every command reads and writes CSV. Fit settings come from [`RunConfig`];
//! a JSON config file may provide any subset of it and flags override.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};
use crate::forecast::{one_step_rolling, predict_recursive, rolling_sum_forecast, AccuracyReport};
use crate::inference::{infer_exogenous, CoefficientTable};
use crate::model_file::ModelFile;
use crate::pacf::pacf;
use crate::penalty::{ExoMode, WeightScheme, DEFAULT_CAP, DEFAULT_LOCALITY_C};
use crate::series::{default_p_star, split_train_test, TimeSeries};
use crate::simulate::{simulate_sar, ExogEffect, ExogGenerator, SarSpec};
use crate::tuning::{fit_srl, Criterion, IcRow, SrlFit, TrainMeta, TuningGrid, DEFAULT_GAMMAS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Uniform,
    Local,
    Seasonal,
    Combined,
    #[default]
    Pacf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExoModeArg {
    Unpenalized,
    Adaptive,
    Uniform,
}

impl From<ExoModeArg> for ExoMode {
    fn from(v: ExoModeArg) -> Self {
        match v {
            ExoModeArg::Unpenalized => ExoMode::Unpenalized,
            ExoModeArg::Adaptive => ExoMode::Adaptive,
            ExoModeArg::Uniform => ExoMode::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Aicc,
    Bic,
}

impl From<CriterionArg> for Criterion {
    fn from(v: CriterionArg) -> Self {
        match v {
            CriterionArg::Aicc => Criterion::Aicc,
            CriterionArg::Bic => Criterion::Bic,
        }
    }
}

/// Settings for a fit-and-evaluate run.
///
/// Defaults: value column `y`, pacf weights, gammas `{0, .25, .5, 1, 2, 4, 16}`,
/// `gamma_l = gamma_s = 1`, `c = 0.5`, cap `1e6`, unpenalized exogenous
/// columns, AICc, 90% training split, horizon 10, seed 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub value_column: String,
    pub exog_columns: Vec<String>,
    /// Categorical covariates as `column:baseline`.
    pub factor_columns: Vec<String>,
    pub time_column: Option<String>,
    pub p_star: Option<usize>,
    pub p_max: Option<usize>,
    pub scheme: SchemeName,
    pub gammas: Vec<f64>,
    pub gamma_l: f64,
    pub gamma_s: f64,
    pub m: Option<f64>,
    pub c: f64,
    pub cap: f64,
    pub exo_mode: ExoMode,
    pub criterion: Criterion,
    pub n_lambda: usize,
    pub train_fraction: f64,
    pub horizon: usize,
    pub level: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            value_column: "y".into(),
            exog_columns: Vec::new(),
            factor_columns: Vec::new(),
            time_column: None,
            p_star: None,
            p_max: None,
            scheme: SchemeName::Pacf,
            gammas: DEFAULT_GAMMAS.to_vec(),
            gamma_l: 1.0,
            gamma_s: 1.0,
            m: None,
            c: DEFAULT_LOCALITY_C,
            cap: DEFAULT_CAP,
            exo_mode: ExoMode::Unpenalized,
            criterion: Criterion::Aicc,
            n_lambda: crate::lasso::DEFAULT_N_LAMBDA,
            train_fraction: 0.9,
            horizon: 10,
            level: 0.95,
            output_dir: PathBuf::from("srlpac-out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SrlError::Config(format!("config file: {e}")))
    }

    /// Canonical serialization; parsing it yields an identical config.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn weight_scheme(&self) -> Result<WeightScheme> {
        let need_m = || {
            self.m.ok_or_else(|| {
                SrlError::Config(format!(
                    "scheme '{:?}' needs a seasonal period m",
                    self.scheme
                ))
            })
        };
        Ok(match self.scheme {
            SchemeName::Uniform => WeightScheme::Uniform,
            SchemeName::Pacf => WeightScheme::Pacf,
            SchemeName::Local => WeightScheme::Local {
                gamma_l: self.gamma_l,
                c: self.c,
            },
            SchemeName::Seasonal => WeightScheme::Seasonal {
                gamma_s: self.gamma_s,
                m: need_m()?,
            },
            SchemeName::Combined => WeightScheme::Combined {
                gamma_l: self.gamma_l,
                gamma_s: self.gamma_s,
                m: need_m()?,
                c: self.c,
            },
        })
    }

    pub fn tuning_grid(&self) -> TuningGrid {
        TuningGrid {
            gammas: self.gammas.clone(),
            n_lambda: self.n_lambda,
            criterion: self.criterion,
            cap: self.cap,
            ..TuningGrid::default()
        }
    }

    fn factor_specs(&self) -> Result<Vec<(String, String)>> {
        self.factor_columns
            .iter()
            .map(|f| {
                f.split_once(':')
                    .map(|(c, b)| (c.to_string(), b.to_string()))
                    .ok_or_else(|| {
                        SrlError::Config(format!("factor '{f}' must be written column:baseline"))
                    })
            })
            .collect()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "srlpac",
    version,
    about = "Sparsity-ranked lasso for long autoregressive models"
)]
pub struct Cli {
    /// JSON file with any subset of the run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Write a simulated seasonal AR series as CSV.
    Simulate(SimulateArgs),
    /// Sample ACF/PACF table for plotting.
    Pacf(PacfArgs),
    /// Tune and fit a model on the training split.
    Fit(FitArgs),
    /// Recursive forecasts from the end of a series.
    Forecast(ForecastArgs),
    /// Out-of-sample accuracy on the test split.
    Evaluate(EvaluateArgs),
    /// Intercept and exogenous coefficients with confidence intervals.
    Coefficients(CoefficientsArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Local AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// Seasonal AR coefficients at lags m, 2m, ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub period: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub n: usize,
    /// Defaults to the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Exogenous effect `name:bernoulli:p:coef`, `name:gaussian:sd:coef` or
    /// `name:sinusoid:period:amplitude:coef`. Repeatable.
    #[arg(long = "exog", allow_hyphen_values = true)]
    pub exog: Vec<String>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PacfArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub value_column: Option<String>,
    /// Defaults to `min(n - 1, 40)`.
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Writes to stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub value_column: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub exog_columns: Option<Vec<String>>,
    /// Categorical covariates as `column:baseline`. Repeatable.
    #[arg(long = "factor")]
    pub factor_columns: Option<Vec<String>>,
    #[arg(long)]
    pub time_column: Option<String>,
    #[arg(long)]
    pub p_star: Option<usize>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma_l: Option<f64>,
    #[arg(long)]
    pub gamma_s: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long, value_enum)]
    pub exo_mode: Option<ExoModeArg>,
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
    #[arg(long)]
    pub n_lambda: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl FitArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone().into();
                }
            };
        }
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = &self.time_column {
            cfg.time_column = Some(v.clone());
        }
        if let Some(v) = self.p_star {
            cfg.p_star = Some(v);
        }
        if let Some(v) = self.p_max {
            cfg.p_max = Some(v);
        }
        if let Some(v) = self.m {
            cfg.m = Some(v);
        }
        set!(value_column);
        set!(exog_columns);
        set!(factor_columns);
        set!(scheme);
        set!(gammas);
        set!(gamma_l);
        set!(gamma_s);
        set!(c);
        set!(cap);
        set!(exo_mode);
        set!(criterion);
        set!(n_lambda);
        set!(train_fraction);
        set!(horizon);
        set!(level);
        set!(output_dir);
        set!(seed);
    }
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// History to forecast from; defaults to the model's input.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Future covariate rows (same columns as the training input).
    #[arg(long)]
    pub exog_future: Option<PathBuf>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Full series (training rows followed by test rows); defaults to the
    /// model's input.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoefficientsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// CSV ingestion

struct RawTable {
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = rdr.headers()?.iter().map(str::to_string).collect();
    let rows = rdr.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(RawTable { headers, rows })
}

/// `row` is the 0-based data row; messages use 1-based data rows.
fn missing_cell(row: usize, column: &str) -> SrlError {
    SrlError::Parse {
        row: row + 1,
        column: column.to_string(),
        message: "missing value".into(),
    }
}

impl RawTable {
    fn column_index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            SrlError::Config(format!(
                "unknown column '{name}'; available columns: {}",
                self.headers.join(", ")
            ))
        })
    }

    fn numeric(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                let cell = rec.get(idx).unwrap_or("");
                if cell.is_empty()
                    || cell.eq_ignore_ascii_case("na")
                    || cell.eq_ignore_ascii_case("nan")
                {
                    return Err(missing_cell(i, name));
                }
                cell.parse::<f64>().map_err(|e| SrlError::Parse {
                    row: i + 1,
                    column: name.to_string(),
                    message: format!("'{cell}': {e}"),
                })
            })
            .collect()
    }

    fn labels(&self, name: &str) -> Result<Vec<String>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, rec)| match rec.get(idx) {
                Some(c) if !c.is_empty() => Ok(c.to_string()),
                _ => Err(missing_cell(i, name)),
            })
            .collect()
    }

    fn check_time(&self, name: &str) -> Result<()> {
        let labels = self.labels(name)?;
        let numeric: Option<Vec<f64>> = labels.iter().map(|l| l.parse().ok()).collect();
        let ordered = match numeric {
            Some(v) => v.windows(2).position(|w| w[1] <= w[0]),
            None => labels.windows(2).position(|w| w[1] <= w[0]),
        };
        match ordered {
            Some(i) => Err(SrlError::Parse {
                row: i + 2,
                column: name.to_string(),
                message: "timestamps must be strictly increasing".into(),
            }),
            None => Ok(()),
        }
    }
}

/// Reads a series for fitting: numeric exogenous columns first, then one
/// indicator block per factor.
pub fn read_series(path: &Path, cfg: &RunConfig) -> Result<TimeSeries> {
    let table = read_table(path)?;
    if let Some(t) = &cfg.time_column {
        table.check_time(t)?;
    }
    let mut ts = TimeSeries::new(table.numeric(&cfg.value_column)?)?;
    if !cfg.exog_columns.is_empty() {
        let cols: Vec<Vec<f64>> = cfg
            .exog_columns
            .iter()
            .map(|c| table.numeric(c))
            .collect::<Result<_>>()?;
        let m = DMatrix::from_fn(ts.n(), cols.len(), |i, j| cols[j][i]);
        ts.add_exog_columns(m, cfg.exog_columns.clone())?;
    }
    for (col, baseline) in cfg.factor_specs()? {
        let labels = table.labels(&col)?;
        ts.add_categorical(&col, &labels, &baseline)?;
    }
    Ok(ts)
}

/// Exogenous matrix laid out exactly as a fitted model expects, so factor
/// levels line up even when a file lists them in a different order.
fn exog_for_model(
    table: &RawTable,
    cfg: &RunConfig,
    meta: &TrainMeta,
) -> Result<Option<DMatrix<f64>>> {
    let k = meta.exog_names.len();
    if k == 0 {
        return Ok(None);
    }
    let n = table.rows.len();
    let mut m = DMatrix::zeros(n, k);
    let mut done = vec![false; k];
    for block in &meta.factors {
        let labels = table.labels(&block.name)?;
        for &c in &block.columns {
            let level = meta.exog_names[c]
                .strip_prefix(&format!("{}=", block.name))
                .unwrap_or_default();
            for (i, l) in labels.iter().enumerate() {
                m[(i, c)] = if l == level { 1.0 } else { 0.0 };
            }
            done[c] = true;
        }
    }
    let mut numeric = cfg.exog_columns.iter();
    for c in 0..k {
        if done[c] {
            continue;
        }
        let name = numeric.next().unwrap_or(&meta.exog_names[c]);
        for (i, v) in table.numeric(name)?.into_iter().enumerate() {
            m[(i, c)] = v;
        }
    }
    Ok(Some(m))
}

fn read_series_for_model(path: &Path, model: &ModelFile) -> Result<TimeSeries> {
    let table = read_table(path)?;
    if let Some(t) = &model.config.time_column {
        table.check_time(t)?;
    }
    let values = table.numeric(&model.config.value_column)?;
    match exog_for_model(&table, &model.config, &model.fit.meta)? {
        Some(ex) => TimeSeries::with_exog(values, ex, model.fit.meta.exog_names.clone()),
        None => TimeSeries::new(values),
    }
    .map(|mut ts| {
        ts_restore_factors(&mut ts, &model.fit.meta);
        ts
    })
}

fn ts_restore_factors(ts: &mut TimeSeries, meta: &TrainMeta) {
    ts.set_factors(meta.factors.clone());
}

fn model_input(explicit: &Option<PathBuf>, model: &ModelFile) -> Result<PathBuf> {
    explicit
        .clone()
        .or_else(|| model.config.input.clone())
        .ok_or_else(|| SrlError::Config("no input file given and the model records none".into()))
}

// ---------------------------------------------------------------------------
// CSV output

fn write_csv<P: AsRef<Path>>(
    path: Option<P>,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    match path {
        Some(p) => fs::write(p, buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    Ok(())
}

fn f(v: f64) -> String {
    format!("{v}")
}

fn report_rows(reports: &[(&str, &AccuracyReport)]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|(name, r)| {
            vec![
                name.to_string(),
                f(r.r2),
                f(r.rmspe),
                f(r.mae),
                f(r.mape),
                r.n_star.to_string(),
            ]
        })
        .collect()
}

const REPORT_HEADER: [&str; 6] = ["model", "r2", "rmspe", "mae", "mape", "n_star"];

pub fn write_ic_table(path: &Path, rows: &[IcRow]) -> Result<()> {
    write_csv(
        Some(path),
        &["gamma", "lambda", "df", "rss", "aicc", "bic", "converged"],
        rows.iter()
            .map(|r| {
                vec![
                    f(r.gamma),
                    f(r.lambda),
                    r.df.to_string(),
                    f(r.rss),
                    f(r.aicc),
                    f(r.bic),
                    r.converged.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn write_coefficients(path: Option<&Path>, table: &CoefficientTable) -> Result<()> {
    write_csv(
        path,
        &[
            "term",
            "estimate",
            "std_error",
            "ci_low",
            "ci_high",
            "baseline",
        ],
        table
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.term.clone(),
                    f(r.estimate),
                    f(r.std_error),
                    f(r.ci_low),
                    f(r.ci_high),
                    r.baseline.to_string(),
                ]
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Commands

fn parse_exog_effect(s: &str) -> Result<ExogEffect> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<f64> {
        parts
            .get(i)
            .ok_or_else(|| SrlError::Config(format!("exog spec '{s}' is incomplete")))?
            .parse()
            .map_err(|_| SrlError::Config(format!("exog spec '{s}': field {i} is not a number")))
    };
    let (generator, coef) = match parts.get(1).copied() {
        Some("bernoulli") => (ExogGenerator::Bernoulli { p: num(2)? }, num(3)?),
        Some("gaussian") => (ExogGenerator::Gaussian { sd: num(2)? }, num(3)?),
        Some("sinusoid") => (
            ExogGenerator::Sinusoid {
                period: num(2)?,
                amplitude: num(3)?,
            },
            num(4)?,
        ),
        _ => {
            return Err(SrlError::Config(format!(
                "exog spec '{s}' must be name:bernoulli|gaussian|sinusoid:..."
            )))
        }
    };
    Ok(ExogEffect {
        name: parts[0].to_string(),
        generator,
        coef,
    })
}

pub fn cmd_simulate(args: &SimulateArgs, cfg: &RunConfig) -> Result<()> {
    let spec = SarSpec {
        phi: args.phi.clone(),
        theta: args.theta.clone(),
        m: args.period,
        beta0: args.beta0,
        sigma: args.sigma,
        exog_effects: args
            .exog
            .iter()
            .map(|e| parse_exog_effect(e))
            .collect::<Result<_>>()?,
        seed: args.seed.unwrap_or(cfg.seed),
        burn_in: args.burn_in,
    };
    let ts = simulate_sar(&spec, args.n)?;
    let mut header = vec!["t".to_string(), "y".to_string()];
    header.extend(ts.exog_names().iter().cloned());
    let rows = (0..ts.n())
        .map(|i| {
            let mut r = vec![(i + 1).to_string(), f(ts.values()[i])];
            if let Some(ex) = ts.exog() {
                r.extend(ex.row(i).iter().map(|v| f(*v)));
            }
            r
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(Some(&args.output), &h, rows)
}

pub fn cmd_pacf(args: &PacfArgs, cfg: &RunConfig) -> Result<()> {
    let input = args
        .input
        .clone()
        .or_else(|| cfg.input.clone())
        .ok_or_else(|| SrlError::Config("pacf needs --input".into()))?;
    let column = args
        .value_column
        .clone()
        .unwrap_or_else(|| cfg.value_column.clone());
    let values = read_table(&input)?.numeric(&column)?;
    let max_lag = args
        .max_lag
        .unwrap_or_else(|| 40.min(values.len().saturating_sub(1)));
    let res = pacf(&values, max_lag)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    let rows = (0..max_lag)
        .map(|j| {
            vec![
                (j + 1).to_string(),
                f(res.acf[j]),
                f(res.pacf[j]),
                f(res.conf_band),
            ]
        })
        .collect();
    write_csv(
        args.output.as_ref(),
        &["lag", "acf", "pacf", "conf_band"],
        rows,
    )
}

/// Outcome of `fit`, also used by the library examples.
pub struct FitOutcome {
    pub model: ModelFile,
    pub coefficients: Option<CoefficientTable>,
    pub summary: String,
}

pub fn run_fit(cfg: &RunConfig) -> Result<FitOutcome> {
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| SrlError::Config("fit needs an input file".into()))?;
    let ts = read_series(&input, cfg)?;
    let (train, test) = split_train_test(&ts, cfg.train_fraction)?;
    let p_star = cfg
        .p_star
        .unwrap_or_else(|| default_p_star(train.n(), cfg.p_max));
    let fit = fit_srl(
        &train,
        p_star,
        cfg.weight_scheme()?,
        &cfg.tuning_grid(),
        cfg.exo_mode,
    )?;
    let coefficients = if cfg.exo_mode == ExoMode::Unpenalized {
        Some(infer_exogenous(&fit, &train, cfg.level)?)
    } else {
        None
    };
    let summary = summarize(
        cfg,
        &fit,
        train.n(),
        test.as_ref().map_or(0, |t| t.n()),
        coefficients.as_ref(),
    );
    Ok(FitOutcome {
        model: ModelFile::new(cfg.clone(), train.n(), ts.n(), fit),
        coefficients,
        summary,
    })
}

fn summarize(
    cfg: &RunConfig,
    fit: &SrlFit,
    n_train: usize,
    n_test: usize,
    coefs: Option<&CoefficientTable>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "srlpac fit summary");
    let _ = writeln!(s, "training observations: {n_train}");
    if n_test == 0 {
        let _ = writeln!(s, "test observations: 0 (evaluation disabled)");
    } else {
        let _ = writeln!(s, "test observations: {n_test}");
    }
    let _ = writeln!(s, "p_star: {}", fit.p_star());
    let _ = writeln!(s, "weight scheme: {}", fit.meta.scheme.name());
    let _ = writeln!(s, "criterion: {:?}", fit.meta.criterion);
    let _ = writeln!(s, "selected gamma: {}", fit.gamma_opt);
    let _ = writeln!(s, "selected lambda: {}", fit.lambda_opt);
    let _ = writeln!(s, "degrees of freedom: {}", fit.df);
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "intercept: {}", fit.intercept);
    let _ = writeln!(s, "active lags ({}):", fit.active_lags.len());
    for &j in &fit.active_lags {
        let _ = writeln!(s, "  lag {j:>5}: {}", fit.lag_coefs[j - 1]);
    }
    if let Some(t) = coefs {
        let _ = writeln!(s, "exogenous coefficients ({:.0}% CI):", t.level * 100.0);
        for r in &t.rows {
            if r.baseline {
                let _ = writeln!(s, "  {:<24} baseline", r.term);
            } else {
                let _ = writeln!(
                    s,
                    "  {:<24} {:>12.6} ({:.6}, {:.6})",
                    r.term, r.estimate, r.ci_low, r.ci_high
                );
            }
        }
    }
    for w in &fit.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<FitOutcome> {
    let out = run_fit(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    out.model.save(&dir.join("model.json"))?;
    write_ic_table(&dir.join("ic_table.csv"), &out.model.fit.ic_table)?;
    let w = &out.model.fit.weights;
    let names = &out.model.fit.meta.exog_names;
    write_csv(
        Some(dir.join("weights.csv")),
        &["column", "weight"],
        w.w.iter()
            .enumerate()
            .map(|(j, v)| {
                let name = if j < w.p_star {
                    format!("lag{}", j + 1)
                } else {
                    names[j - w.p_star].clone()
                };
                vec![name, f(*v)]
            })
            .collect(),
    )?;
    if let Some(t) = &out.coefficients {
        write_coefficients(Some(&dir.join("coefficients.csv")), t)?;
    }
    fs::write(dir.join("summary.txt"), &out.summary)?;
    Ok(out)
}

pub fn cmd_forecast(args: &ForecastArgs) -> Result<Vec<f64>> {
    let model = ModelFile::load(&args.model)?;
    let input = model_input(&args.input, &model)?;
    let ts = read_series_for_model(&input, &model)?;
    let h = args.horizon.unwrap_or(model.config.horizon);
    let future = match &args.exog_future {
        Some(p) => exog_for_model(&read_table(p)?, &model.config, &model.fit.meta)?,
        None => None,
    };
    let fc = predict_recursive(&model.fit, ts.values(), future.as_ref(), h)?;
    write_csv(
        args.output.as_ref(),
        &["step", "forecast"],
        fc.iter()
            .enumerate()
            .map(|(s, v)| vec![(s + 1).to_string(), f(*v)])
            .collect(),
    )?;
    Ok(fc)
}

/// One-step and rolling-sum accuracy on the rows after the training split.
pub struct Evaluation {
    pub one_step: AccuracyReport,
    pub rolling: Option<AccuracyReport>,
    pub one_step_pairs: crate::forecast::OneStep,
    pub rolling_pairs: crate::forecast::RollingSums,
}

pub fn run_evaluate(model: &ModelFile, ts: &TimeSeries, h: usize) -> Result<Evaluation> {
    if ts.n() <= model.n_train {
        return Err(SrlError::InvalidInput(format!(
            "no test rows: the series has {} observations and the model trained on {}",
            ts.n(),
            model.n_train
        )));
    }
    let os = one_step_rolling(&model.fit, ts, model.n_train)?;
    let one_step = AccuracyReport::compute(&os.predicted, &os.actual)?;
    let rs = rolling_sum_forecast(&model.fit, ts, model.n_train, h)?;
    let rolling = if rs.predicted.is_empty() {
        None
    } else {
        Some(AccuracyReport::compute(&rs.predicted, &rs.actual)?)
    };
    Ok(Evaluation {
        one_step,
        rolling,
        one_step_pairs: os,
        rolling_pairs: rs,
    })
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<Evaluation> {
    let model = ModelFile::load(&args.model)?;
    let input = model_input(&args.input, &model)?;
    let ts = read_series_for_model(&input, &model)?;
    let h = args.horizon.unwrap_or(model.config.horizon);
    let ev = run_evaluate(&model, &ts, h)?;
    for w in &ev.rolling_pairs.warnings {
        eprintln!("warning: {w}");
    }
    let dir = args
        .output_dir
        .clone()
        .unwrap_or_else(|| model.config.output_dir.clone());
    fs::create_dir_all(&dir)?;
    write_csv(
        Some(dir.join("metrics_one_step.csv")),
        &REPORT_HEADER,
        report_rows(&[("one_step", &ev.one_step)]),
    )?;
    let rolling_name = format!("rolling_sum_h{h}");
    write_csv(
        Some(dir.join("metrics_rolling_sum.csv")),
        &REPORT_HEADER,
        ev.rolling
            .as_ref()
            .map(|r| report_rows(&[(&rolling_name, r)]))
            .unwrap_or_default(),
    )?;
    write_csv(
        Some(dir.join("predictions_one_step.csv")),
        &["index", "predicted", "actual"],
        (0..ev.one_step_pairs.index.len())
            .map(|i| {
                vec![
                    (ev.one_step_pairs.index[i] + 1).to_string(),
                    f(ev.one_step_pairs.predicted[i]),
                    f(ev.one_step_pairs.actual[i]),
                ]
            })
            .collect(),
    )?;
    write_csv(
        Some(dir.join("predictions_rolling_sum.csv")),
        &["origin", "predicted", "actual"],
        (0..ev.rolling_pairs.origins.len())
            .map(|i| {
                vec![
                    (ev.rolling_pairs.origins[i] + 1).to_string(),
                    f(ev.rolling_pairs.predicted[i]),
                    f(ev.rolling_pairs.actual[i]),
                ]
            })
            .collect(),
    )?;
    let report = serde_json::json!({
        "horizon": h,
        "one_step": ev.one_step,
        "rolling_sum": ev.rolling,
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    Ok(ev)
}

pub fn cmd_coefficients(args: &CoefficientsArgs) -> Result<CoefficientTable> {
    let model = ModelFile::load(&args.model)?;
    let input = model_input(&args.input, &model)?;
    let ts = read_series_for_model(&input, &model)?;
    if ts.n() < model.n_train {
        return Err(SrlError::InvalidInput(format!(
            "input has {} rows but the model trained on {}",
            ts.n(),
            model.n_train
        )));
    }
    let train = if ts.n() == model.n_train {
        ts
    } else {
        ts.slice(0, model.n_train)
    };
    let table = infer_exogenous(&model.fit, &train, args.level.unwrap_or(model.config.level))?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    write_coefficients(args.output.as_deref(), &table)?;
    Ok(table)
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn print_report(label: &str, r: &AccuracyReport) {
    println!(
        "{label:<12} {:>6} {:>12.6} {:>12.6} {:>12.4} {:>10.4}",
        r.n_star, r.rmspe, r.mae, r.mape, r.r2
    );
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, &cfg),
        Command::Pacf(a) => cmd_pacf(&a, &cfg),
        Command::Fit(a) => {
            a.apply(&mut cfg);
            let out = cmd_fit(&cfg)?;
            print!("{}", out.summary);
            Ok(())
        }
        Command::Forecast(a) => cmd_forecast(&a).map(|_| ()),
        Command::Evaluate(a) => {
            let ev = cmd_evaluate(&a)?;
            println!(
                "{:<12} {:>6} {:>12} {:>12} {:>12} {:>10}",
                "", "n", "rmspe", "mae", "mape", "r2"
            );
            print_report("one-step", &ev.one_step);
            if let Some(r) = &ev.rolling {
                print_report("rolling-sum", r);
            }
            Ok(())
        }
        Command::Coefficients(a) => cmd_coefficients(&a).map(|_| ()),
    }
}
