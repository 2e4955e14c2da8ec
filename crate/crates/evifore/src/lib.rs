//! Streaming one-step-ahead time-series forecasting by evidence fusion.
//!
//! Every consecutive pair of observations contributes a mass on a binary
//! frame — the ratio of the earlier value to the later one against its
//! complement. Dempster's rule fuses all pairwise masses into a global
//! growth belief that is maintained as a pair of running products, so
//! absorbing a new observation costs the same whether the history holds ten
//! points or ten million. The forecast magnitude comes from a running
//! aggregate of per-point extrapolations; the prediction is the product of
//! the two.
//!
//! ```
//! use evifore::{EvStrategy, Forecaster, TimeSeries};
//!
//! let series = TimeSeries::from_values(&[10.0, 12.0, 11.0, 14.0, 10.0, 15.0]).unwrap();
//! let (mut forecaster, prediction) =
//!     Forecaster::init(&series, EvStrategy::RatioOffset).unwrap();
//! assert!((prediction - 15.75).abs() < 5e-3);
//!
//! // Streaming: absorb the value that actually arrived, get the next forecast.
//! let next = forecaster.update(16.0).unwrap();
//! assert!((next - 16.75).abs() < 5e-3);
//! ```
//!
//! See the crate examples for runnable walkthroughs of each capability and
//! the `evifore` binary for the CLI.

pub mod baselines;
pub mod cli;
pub mod domain;
pub mod error;
pub mod evidence;
pub mod forecaster;
pub mod ingest;
pub mod metrics;
pub mod valuation;

pub use domain::{ForecastSnapshot, TimePoint, TimeSeries, SNAPSHOT_VERSION};
pub use error::{Error, Result};
pub use evidence::{combine_dempster, BinaryBpa, FusionState, GeneralBpa};
pub use forecaster::{backtest, BacktestResult, Forecaster, Method, PredictionRecord};
pub use ingest::{load_csv, load_snapshot, save_snapshot, write_csv, ColumnSelector, CsvSpec};
pub use metrics::{compute_metrics, MetricsReport};
pub use valuation::{evidential_value, slope_global_value, EvStrategy, ValuationState};
