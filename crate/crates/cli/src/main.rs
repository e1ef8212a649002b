//! `loadcast`: diagnose, fit, select, forecast and evaluate hourly load
//! series with SARIMA-GARCH(1,1) models.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use loadcast::estimate::{self, Criterion, FitOptions};
use loadcast::forecast::{forecast_with_options, ForecastOptions};
use loadcast::series::{self, LoadSeries, ReturnSeries};
use loadcast::{diagnostics, evaluate, Error, FittedModel, InnovationFamily, ModelSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_MODEL: u8 = 3;

#[derive(Parser)]
#[command(name = "loadcast", version, about = "Short-term load forecasting with SARIMA-GARCH models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run unit-root and serial-correlation tests on levels and log-returns
    Diagnose {
        /// Input CSV with `timestamp,load` columns
        #[arg(long)]
        input: PathBuf,
        /// Lags for the portmanteau tests (default 20); ADF uses the Schwert rule
        #[arg(long)]
        lags: Option<usize>,
        /// Output path for the JSON report (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit a SARIMA-GARCH model by maximum likelihood
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Model spec JSON file
        #[arg(long)]
        spec: PathBuf,
        /// Override the spec's innovation family
        #[arg(long)]
        innovation: Option<InnovationArg>,
        /// Reserve the last N returns as a holdout; fit on the rest
        #[arg(long)]
        holdout: Option<usize>,
        /// Seed for the optimizer's jittered restarts
        #[arg(long)]
        seed: Option<u64>,
        /// Output path for the fitted-model JSON (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit every candidate spec and keep the best by information criterion
    Select {
        #[arg(long)]
        input: PathBuf,
        /// JSON file with one spec or an array of candidate specs
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = CriterionArg::Bic)]
        criterion: CriterionArg,
        #[arg(long)]
        innovation: Option<InnovationArg>,
        #[arg(long)]
        holdout: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Forecast future load levels with prediction intervals
    Forecast {
        #[arg(long)]
        input: PathBuf,
        /// Fitted-model JSON (from `fit`/`select`) or a spec JSON to fit first
        #[arg(long)]
        spec: PathBuf,
        /// Drop the last N returns before forecasting (forecast the holdout)
        #[arg(long)]
        holdout: Option<usize>,
        #[arg(long, default_value_t = 24)]
        horizon: usize,
        #[arg(long, default_value_t = 0.95)]
        coverage: f64,
        #[arg(long, value_enum, default_value_t = OnOff::Off)]
        level_correction: OnOff,
        #[arg(long)]
        innovation: Option<InnovationArg>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; `.csv` writes the forecast table, otherwise JSON
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score predictions against actuals and rank competing models
    Evaluate {
        /// CSV with `timestamp,actual` then one column per prediction source
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InnovationArg {
    Normal,
    #[value(name = "skew_normal")]
    SkewNormal,
    #[value(name = "student_t")]
    StudentT,
}

impl From<InnovationArg> for InnovationFamily {
    fn from(arg: InnovationArg) -> Self {
        match arg {
            InnovationArg::Normal => InnovationFamily::Normal,
            InnovationArg::SkewNormal => InnovationFamily::SkewNormal,
            InnovationArg::StudentT => InnovationFamily::StudentT,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Aic,
    Bic,
}

impl From<CriterionArg> for Criterion {
    fn from(arg: CriterionArg) -> Self {
        match arg {
            CriterionArg::Aic => Criterion::Aic,
            CriterionArg::Bic => Criterion::Bic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

/// A failure paired with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::HoldoutOutOfRange { .. }
            | Error::InvalidHorizon
            | Error::CoverageOutOfRange(_)
            | Error::ProbabilityOutOfRange(_)
            | Error::InvalidLags { .. }
            | Error::InvalidDistribution(_)
            | Error::InvalidSpec(_) => EXIT_USAGE,
            Error::NonIncreasingTimestamps(_)
            | Error::NonPositiveLevel { .. }
            | Error::SeriesTooShort { .. }
            | Error::IrregularGrid(_)
            | Error::LengthMismatch { .. }
            | Error::EmptyInput
            | Error::ConstantSeries
            | Error::InsufficientData { .. }
            | Error::CsvParse { .. }
            | Error::Io(_) => EXIT_DATA,
            Error::SingularMatrix
            | Error::NonFiniteArgument(_)
            | Error::InvalidParams(_)
            | Error::NonFiniteLikelihood
            | Error::NonStationary
            | Error::AllCandidatesFailed(_) => EXIT_MODEL,
        };
        Failure { code, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(EXIT_USAGE) };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Diagnose { input, lags, output } => diagnose(&input, lags, output.as_deref()),
        Command::Fit { input, spec, innovation, holdout, seed, output } => {
            let fitted = fit_pipeline(&input, &spec, innovation, holdout, seed)?;
            emit_json(&fitted, output.as_deref())
        }
        Command::Select { input, spec, criterion, innovation, holdout, seed, output } => {
            let train = training_returns(&input, holdout)?;
            let mut candidates = read_candidates(&spec)?;
            if let Some(family) = innovation {
                for spec in &mut candidates {
                    spec.innovation = family.into();
                }
            }
            let best = estimate::select_with_seed(
                &candidates,
                train.values(),
                criterion.into(),
                seed.unwrap_or(0x5eed),
            )?;
            warn(&best);
            emit_json(&best, output.as_deref())
        }
        Command::Forecast {
            input,
            spec,
            holdout,
            horizon,
            coverage,
            level_correction,
            innovation,
            seed,
            output,
        } => {
            let train = training_returns(&input, holdout)?;
            let model = load_or_fit(&spec, &train, innovation, seed)?;
            let options = ForecastOptions { level_correction: level_correction == OnOff::On };
            let result = forecast_with_options(
                &model,
                train.values(),
                train.last_level(),
                horizon,
                coverage,
                &options,
            )?;
            let wants_csv = output
                .as_deref()
                .and_then(Path::extension)
                .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
            if wants_csv {
                let file = File::create(output.as_deref().unwrap()).map_err(Error::Io)?;
                result.write_csv(file, train.last_timestamp())?;
                Ok(())
            } else {
                emit_json(&result, output.as_deref())
            }
        }
        Command::Evaluate { input, output } => {
            let (actual, predictions) = read_evaluation_table(&input)?;
            let report = evaluate::compare(&actual, &predictions)?;
            emit_json(&report, output.as_deref())
        }
    }
}

fn diagnose(input: &Path, lags: Option<usize>, output: Option<&Path>) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Battery {
        adf: diagnostics::TestReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        ljung_box: Option<diagnostics::TestReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mcleod_li: Option<diagnostics::TestReport>,
    }
    #[derive(Serialize)]
    struct Report {
        n: usize,
        levels: Battery,
        returns: Battery,
    }

    let series = LoadSeries::read_csv_path(input)?;
    let returns = series::log_returns(&series);
    let lags = lags.unwrap_or(diagnostics::DEFAULT_PORTMANTEAU_LAGS);
    let report = Report {
        n: series.len(),
        levels: Battery {
            adf: diagnostics::adf_test(series.values(), None)?,
            ljung_box: None,
            mcleod_li: None,
        },
        returns: Battery {
            adf: diagnostics::adf_test(returns.values(), None)?,
            ljung_box: Some(diagnostics::ljung_box(returns.values(), lags)?),
            mcleod_li: Some(diagnostics::mcleod_li(returns.values(), lags)?),
        },
    };
    emit_json(&report, output)
}

fn fit_pipeline(
    input: &Path,
    spec_path: &Path,
    innovation: Option<InnovationArg>,
    holdout: Option<usize>,
    seed: Option<u64>,
) -> Result<FittedModel, Failure> {
    let train = training_returns(input, holdout)?;
    let mut spec: ModelSpec = read_json(spec_path)?;
    if let Some(family) = innovation {
        spec.innovation = family.into();
    }
    let options = FitOptions { seed, ..Default::default() };
    let fitted = estimate::fit_with_options(&spec, train.values(), &options)?;
    warn(&fitted);
    Ok(fitted)
}

/// Reads the training returns, dropping the last `holdout` observations when
/// requested.
fn training_returns(input: &Path, holdout: Option<usize>) -> Result<ReturnSeries, Failure> {
    let series = LoadSeries::read_csv_path(input)?;
    let returns = series::log_returns(&series);
    match holdout {
        Some(0) | None => Ok(returns),
        Some(h) => Ok(series::split(&returns, h)?.0),
    }
}

/// Interprets `--spec` as a fitted model first, falling back to a bare spec
/// that is fitted on the training returns.
fn load_or_fit(
    path: &Path,
    train: &ReturnSeries,
    innovation: Option<InnovationArg>,
    seed: Option<u64>,
) -> Result<FittedModel, Failure> {
    let text = read_text(path)?;
    if let Ok(fitted) = serde_json::from_str::<FittedModel>(&text) {
        return Ok(fitted);
    }
    let mut spec: ModelSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: not a fitted model or spec: {e}", path.display())))?;
    if let Some(family) = innovation {
        spec.innovation = family.into();
    }
    let options = FitOptions { seed, ..Default::default() };
    let fitted = estimate::fit_with_options(&spec, train.values(), &options)?;
    warn(&fitted);
    Ok(fitted)
}

fn read_candidates(path: &Path) -> Result<Vec<ModelSpec>, Failure> {
    let text = read_text(path)?;
    if let Ok(list) = serde_json::from_str::<Vec<ModelSpec>>(&text) {
        return Ok(list);
    }
    let single: ModelSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(vec![single])
}

/// Reads an evaluation table: `timestamp,actual` followed by one column per
/// prediction source, keyed by header name.
fn read_evaluation_table(
    path: &Path,
) -> Result<(Vec<f64>, std::collections::BTreeMap<String, Vec<f64>>), Failure> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyInput)?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.len() < 3 {
        return Err(Failure::from(Error::CsvParse {
            line: 1,
            msg: "need timestamp, actual and at least one prediction column".into(),
        }));
    }
    let mut actual = Vec::new();
    let mut predictions: Vec<Vec<f64>> = vec![Vec::new(); names.len() - 2];
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(Failure::from(Error::CsvParse {
                line: idx + 1,
                msg: format!("expected {} fields, got {}", names.len(), fields.len()),
            }));
        }
        let parse = |s: &str| -> Result<f64, Failure> {
            s.parse::<f64>().map_err(|_| {
                Failure::from(Error::CsvParse {
                    line: idx + 1,
                    msg: format!("not a number: {s}"),
                })
            })
        };
        actual.push(parse(fields[1])?);
        for (j, column) in predictions.iter_mut().enumerate() {
            column.push(parse(fields[j + 2])?);
        }
    }
    let map = names[2..]
        .iter()
        .map(|s| s.to_string())
        .zip(predictions)
        .collect();
    Ok((actual, map))
}

fn warn(fitted: &FittedModel) {
    if let Some(message) = &fitted.warning {
        eprintln!("warning: {message}");
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Failure::from(Error::Io(e)))?;
    Ok(text)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::usage(format!("serialization failed: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => {
            File::create(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| Failure::from(Error::Io(e)))?;
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::from(Error::Io(e)))?,
    }
    Ok(())
}
