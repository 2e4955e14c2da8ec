//! Command-line entry points: forecast, backtest, bench, and demo.
//!
//! Conventions: stdout carries only data, diagnostics go to stderr (enable
//! them with the `EVIFORE_LOG` environment variable, e.g. `EVIFORE_LOG=info`),
//! and exit codes are stable — 0 success, 2 data error, 3 numeric
//! degeneracy, 64 usage error.

pub mod bench;
pub mod demo;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use crate::forecaster::{backtest, BacktestResult, Forecaster, Method};
use crate::ingest::{load_csv, ColumnSelector, CsvSpec};
use crate::valuation::EvStrategy;

pub const EXIT_OK: i32 = 0;
/// A golden check in `demo` unexpectedly failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_DATA_ERROR: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "evifore",
    version,
    about = "Streaming one-step-ahead forecasting by evidence fusion"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forecast the next value of a series read from CSV
    Forecast(ForecastArgs),
    /// Rolling one-step-ahead backtest with error metrics
    Backtest(BacktestArgs),
    /// Measure per-update latency over a continuous-prediction run
    Bench(BenchArgs),
    /// Run the bundled example series and verify every intermediate
    /// against its golden value
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Input CSV path
    #[arg(long)]
    input: PathBuf,
    /// Value column: 0-based index or header name
    #[arg(long, default_value = "0")]
    value_col: ColumnSelector,
    /// Time column: 0-based index or header name; rows are indexed 1..n
    /// when absent
    #[arg(long)]
    time_col: Option<ColumnSelector>,
    /// Treat the first row as a header
    #[arg(long)]
    has_header: bool,
    /// Field delimiter
    #[arg(long, default_value = ",")]
    delimiter: char,
}

impl CsvArgs {
    fn spec(&self) -> Result<CsvSpec, CliFailure> {
        if !self.delimiter.is_ascii() || (self.delimiter as u32) < 0x20 {
            return Err(CliFailure::usage(format!(
                "--delimiter must be a printable ASCII character, got {:?}",
                self.delimiter
            )));
        }
        Ok(CsvSpec {
            value_column: self.value_col.clone(),
            time_column: self.time_col.clone(),
            has_header: self.has_header,
            delimiter: self.delimiter as u8,
        })
    }
}

#[derive(Debug, Args)]
struct ForecastArgs {
    #[command(flatten)]
    csv: CsvArgs,
    /// Evidential-value strategy
    #[arg(long, default_value = "ratio")]
    strategy: EvStrategy,
    /// Decimal places on printed values
    #[arg(long, default_value_t = 4)]
    precision: usize,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[command(flatten)]
    csv: CsvArgs,
    /// Observations consumed before the first scored forecast
    #[arg(long, default_value_t = 4)]
    seed_len: usize,
    /// Forecasting method
    #[arg(long, default_value = "evidential")]
    method: MethodArg,
    /// Moving-average window (with --method sma)
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Evidential-value strategy
    #[arg(long, default_value = "ratio")]
    strategy: EvStrategy,
    /// Output format
    #[arg(long, default_value = "table")]
    format: Format,
    /// Decimal places on printed values (table format)
    #[arg(long, default_value_t = 4)]
    precision: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Length of the synthetic series (ignored with --input)
    #[arg(long, default_value_t = 13_777)]
    n: usize,
    /// Replay a CSV instead of the synthetic series (single value column)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Measurement repetitions
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// RNG seed for the synthetic series
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Observations consumed before streaming starts
    #[arg(long, default_value_t = 4)]
    seed_len: usize,
    /// Evidential-value strategy
    #[arg(long, default_value = "ratio")]
    strategy: EvStrategy,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Evidential-value strategy
    #[arg(long, default_value = "ratio")]
    strategy: EvStrategy,
    /// Output format (table or json)
    #[arg(long, default_value = "table")]
    format: Format,
    /// Decimal places on printed values (table format)
    #[arg(long, default_value_t = 4)]
    precision: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Evidential,
    Sma,
}

impl std::str::FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "evidential" => Ok(MethodArg::Evidential),
            "sma" => Ok(MethodArg::Sma),
            other => Err(format!("unknown method {other:?} (expected evidential or sma)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected table, csv, or json)")),
        }
    }
}

/// Failure of a command, carrying its process exit code.
struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn usage(message: String) -> Self {
        Self { code: EXIT_USAGE, message }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TotalConflict { .. } => EXIT_DEGENERATE,
            _ => EXIT_DATA_ERROR,
        };
        Self { code, message: e.to_string() }
    }
}

/// Parses arguments from the process environment and runs the command.
/// Returns the process exit code.
pub fn run() -> i32 {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter("EVIFORE_LOG");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

fn dispatch(cli: Cli) -> Result<(), CliFailure> {
    match cli.command {
        Command::Forecast(args) => cmd_forecast(args),
        Command::Backtest(args) => cmd_backtest(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

fn cmd_forecast(args: ForecastArgs) -> Result<(), CliFailure> {
    let series = load_csv(&args.csv.input, &args.csv.spec()?)?;
    log::info!("loaded {} points from {}", series.len(), args.csv.input.display());
    let (_, prediction) = Forecaster::init(&series, args.strategy)?;
    println!("{prediction:.*}", args.precision);
    Ok(())
}

fn cmd_backtest(args: BacktestArgs) -> Result<(), CliFailure> {
    let method = match args.method {
        MethodArg::Evidential => Method::Evidential,
        MethodArg::Sma => {
            if args.k == 0 {
                return Err(CliFailure::usage("--k must be at least 1".to_string()));
            }
            Method::Sma { k: args.k }
        }
    };
    let series = load_csv(&args.csv.input, &args.csv.spec()?)?;
    log::info!(
        "backtesting {} points, seed {}, method {}",
        series.len(),
        args.seed_len,
        method.name()
    );
    let result = backtest(&series, args.seed_len, args.strategy, method)?;
    match args.format {
        Format::Table => print!("{}", render_backtest_table(&result, method, args.strategy, args.precision)),
        Format::Csv => print!("{}", render_backtest_csv(&result)),
        Format::Json => println!("{}", backtest_json(&result, method, args.strategy)),
    }
    Ok(())
}

fn render_backtest_table(
    result: &BacktestResult,
    method: Method,
    strategy: EvStrategy,
    precision: usize,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>10} {:>14} {:>14}", "t", "actual", "predicted");
    for r in &result.predictions {
        let _ = writeln!(
            out,
            "{:>10} {:>14} {:>14}",
            r.t,
            format!("{:.*}", precision, r.actual),
            format!("{:.*}", precision, r.predicted)
        );
    }
    let m = &result.metrics;
    let _ = writeln!(out);
    let _ = writeln!(out, "method      {}", method.name());
    let _ = writeln!(out, "strategy    {strategy}");
    let _ = writeln!(out, "seed_len    {}", result.seed_len);
    let _ = writeln!(out, "n           {}", m.n);
    let _ = writeln!(out, "mad         {:.*}", precision, m.mad);
    let _ = writeln!(out, "mape_pct    {:.*}", precision, m.mape_pct);
    let _ = writeln!(out, "rmse        {:.*}", precision, m.rmse);
    match m.nrmse_pct {
        Some(v) => {
            let _ = writeln!(out, "nrmse_pct   {v:.precision$}");
        }
        None => {
            let _ = writeln!(out, "nrmse_pct   undefined (zero truth range)");
        }
    }
    let _ = writeln!(out, "smape_pct   {:.*}", precision, m.smape_pct);
    let _ = writeln!(out, "elapsed_ms  {:.3}", result.elapsed.as_secs_f64() * 1e3);
    if let (Some(p50), Some(p99)) = (
        result.latency_percentile_ns(50.0),
        result.latency_percentile_ns(99.0),
    ) {
        let _ = writeln!(out, "p50_ns      {p50}");
        let _ = writeln!(out, "p99_ns      {p99}");
    }
    out
}

fn render_backtest_csv(result: &BacktestResult) -> String {
    let mut out = String::from("t,actual,predicted\n");
    for r in &result.predictions {
        let _ = writeln!(out, "{},{},{}", r.t, r.actual, r.predicted);
    }
    let m = &result.metrics;
    out.push('\n');
    out.push_str("n,mad,mape_pct,rmse,nrmse_pct,smape_pct\n");
    let nrmse = m.nrmse_pct.map_or(String::new(), |v| v.to_string());
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        m.n, m.mad, m.mape_pct, m.rmse, nrmse, m.smape_pct
    );
    out
}

fn backtest_json(result: &BacktestResult, method: Method, strategy: EvStrategy) -> String {
    let value = json!({
        "method": method.name(),
        "strategy": strategy,
        "seed_len": result.seed_len,
        "predictions": result.predictions,
        "metrics": result.metrics,
        "nrmse_normalization": "range of the truth values in the evaluated window",
        "elapsed_ns": result.elapsed.as_nanos() as u64,
        "per_update_ns": {
            "p50": result.latency_percentile_ns(50.0),
            "p99": result.latency_percentile_ns(99.0),
        },
    });
    serde_json::to_string_pretty(&value).expect("report serialization cannot fail")
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliFailure> {
    if args.repeats == 0 {
        return Err(CliFailure::usage("--repeats must be at least 1".to_string()));
    }
    if args.seed_len < 2 {
        return Err(CliFailure::usage("--seed-len must be at least 2".to_string()));
    }
    let (series, source) = match &args.input {
        Some(path) => (load_csv(path, &CsvSpec::default())?, path.display().to_string()),
        None => (
            crate::domain::TimeSeries::random_walk(args.n, args.seed),
            format!("synthetic(seed={})", args.seed),
        ),
    };
    if series.len() <= args.seed_len {
        return Err(CliFailure::from(Error::SeriesTooShort {
            needed: args.seed_len + 1,
            got: series.len(),
        }));
    }
    log::info!(
        "benchmarking {} updates x{} on {source}",
        series.len() - args.seed_len,
        args.repeats
    );
    let report = bench::run(&series, args.seed_len, args.strategy, args.repeats)?;
    let mut value = serde_json::to_value(&report).expect("report serialization cannot fail");
    value["source"] = json!(source);
    println!("{}", serde_json::to_string_pretty(&value).expect("valid json"));
    Ok(())
}

fn cmd_demo(args: DemoArgs) -> Result<(), CliFailure> {
    let report = demo::build_report(args.strategy)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialization cannot fail")
        ),
        _ => print!("{}", demo::render_table(&report, args.precision)),
    }
    if report.all_pass {
        Ok(())
    } else {
        Err(CliFailure {
            code: EXIT_CHECK_FAILED,
            message: format!(
                "{} of {} golden checks failed",
                report.checks.len() - report.passed(),
                report.checks.len()
            ),
        })
    }
}
