//! The end-to-end forecaster: batch initialization, constant-time streaming
//! updates, prediction recovery, and rolling backtests.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::baselines::sma_predict;
use crate::domain::{ForecastSnapshot, TimePoint, TimeSeries, SNAPSHOT_VERSION};
use crate::error::{Error, Result};
use crate::evidence::{BinaryBpa, FusionState};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::valuation::{slope_global_value, EvStrategy, ValuationState};

/// Streaming one-step-ahead forecaster.
///
/// The forecast is the product of two aggregates maintained over the
/// history: the fused pairwise growth belief and the mean of per-point
/// extrapolations. Under the default [`EvStrategy::RatioOffset`] both are
/// carried as running sums/products, so absorbing a new observation and
/// producing the next forecast cost the same regardless of history length.
/// [`EvStrategy::SlopeExtrapolation`] retains the full series and pays O(n)
/// per prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecaster {
    fusion: FusionState,
    valuation: ValuationState,
    strategy: EvStrategy,
    retained: Option<TimeSeries>,
}

impl Forecaster {
    /// Consumes a whole series at once and returns the forecaster plus its
    /// forecast of the next value.
    pub fn init(series: &TimeSeries, strategy: EvStrategy) -> Result<(Self, f64)> {
        if series.len() < 2 {
            return Err(Error::SeriesTooShort { needed: 2, got: series.len() });
        }
        let retained = match strategy {
            EvStrategy::RatioOffset => None,
            EvStrategy::SlopeExtrapolation => Some(series.clone()),
        };
        let mut fusion = FusionState::new();
        let mut valuation = ValuationState::new();
        let points = series.points();
        valuation = valuation.update(points[0])?;
        for window in points.windows(2) {
            fusion = fusion.fuse(&BinaryBpa::from_pair(window[0].y(), window[1].y())?);
            valuation = valuation.update(window[1])?;
        }
        let forecaster = Self { fusion, valuation, strategy, retained };
        let prediction = forecaster.predict()?;
        Ok((forecaster, prediction))
    }

    /// Absorbs one new observation at the next implied timestamp (previous
    /// timestamp plus the trailing spacing) and returns the new forecast.
    pub fn update(&mut self, new_value: f64) -> Result<f64> {
        let t = self.valuation.t_last() + self.valuation.trailing_spacing();
        self.update_at(t, new_value)
    }

    /// Absorbs one new observation with an explicit timestamp.
    ///
    /// The observation is absorbed into the state even when the resulting
    /// forecast is degenerate (total conflict): observed values, not
    /// forecasts, feed subsequent state.
    pub fn update_at(&mut self, t: f64, new_value: f64) -> Result<f64> {
        let point = TimePoint::new(t, new_value)?;
        let bpa = BinaryBpa::from_pair(self.valuation.y_last(), new_value)?;
        let valuation = self.valuation.update(point)?;
        if let Some(series) = &mut self.retained {
            series.push(point)?;
        }
        self.fusion = self.fusion.fuse(&bpa);
        self.valuation = valuation;
        self.predict()
    }

    /// The forecast of the next value: combined belief times global value.
    /// Pure query; never clamped, so a degenerate belief is surfaced as-is.
    pub fn predict(&self) -> Result<f64> {
        if self.valuation.count() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                got: self.valuation.count() as usize,
            });
        }
        let global_value = match self.strategy {
            EvStrategy::RatioOffset => self.valuation.global_value()?,
            EvStrategy::SlopeExtrapolation => {
                let series = self.retained.as_ref().ok_or(Error::CorruptSnapshot {
                    reason: "slope strategy requires the retained series".into(),
                })?;
                slope_global_value(series)?
            }
        };
        Ok(global_value * self.fusion.gbpa()?)
    }

    pub fn strategy(&self) -> EvStrategy {
        self.strategy
    }

    pub fn fusion(&self) -> &FusionState {
        &self.fusion
    }

    pub fn valuation(&self) -> &ValuationState {
        &self.valuation
    }

    /// Count of observations consumed.
    pub fn count(&self) -> u64 {
        self.valuation.count()
    }

    /// Serializable image of the current state.
    pub fn snapshot(&self) -> ForecastSnapshot {
        ForecastSnapshot {
            version: SNAPSHOT_VERSION,
            strategy: self.strategy,
            fusion: self.fusion,
            valuation: self.valuation,
            n: self.valuation.count(),
            retained_series: self.retained.as_ref().map(|s| s.points().to_vec()),
        }
    }

    /// Rebuilds a forecaster from a snapshot, re-checking its invariants.
    pub fn from_snapshot(snapshot: ForecastSnapshot) -> Result<Self> {
        snapshot.validate()?;
        let retained = match snapshot.strategy {
            EvStrategy::RatioOffset => None,
            EvStrategy::SlopeExtrapolation => {
                let points = snapshot.retained_series.ok_or(Error::CorruptSnapshot {
                    reason: "slope strategy snapshot is missing the retained series".into(),
                })?;
                if points.len() as u64 != snapshot.n {
                    return Err(Error::CorruptSnapshot {
                        reason: "retained series length does not match observation count"
                            .into(),
                    });
                }
                Some(TimeSeries::new(points).map_err(|e| Error::CorruptSnapshot {
                    reason: format!("retained series invalid: {e}"),
                })?)
            }
        };
        Ok(Self {
            fusion: snapshot.fusion,
            valuation: snapshot.valuation,
            strategy: snapshot.strategy,
            retained,
        })
    }
}

/// Forecasting method run by a backtest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Evidential,
    Sma { k: usize },
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Evidential => "evidential".to_string(),
            Method::Sma { k } => format!("sma(k={k})"),
        }
    }
}

/// One scored forecast of a backtest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub t: f64,
    pub actual: f64,
    pub predicted: f64,
}

/// Outcome of a rolling one-step-ahead backtest.
#[derive(Debug, Clone)]
pub struct BacktestResult {
    /// Scored forecasts for indices `seed_len + 1 ..= n`, in order.
    pub predictions: Vec<PredictionRecord>,
    pub seed_len: usize,
    pub metrics: MetricsReport,
    /// Wall-clock time of the forecasting loop, excluding I/O and metric
    /// computation.
    pub elapsed: Duration,
    /// Latency of each forecast-producing step (update + predict), in
    /// nanoseconds. One fewer sample than predictions for the evidential
    /// method because the first forecast comes from initialization.
    pub per_update_ns: Vec<u64>,
}

impl BacktestResult {
    /// Latency percentile in nanoseconds, by nearest-rank.
    pub fn latency_percentile_ns(&self, q: f64) -> Option<u64> {
        percentile_ns(&self.per_update_ns, q)
    }
}

pub(crate) fn percentile_ns(samples: &[u64], q: f64) -> Option<u64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let rank = ((q / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Rolls through `series` forecasting one step ahead: each value past the
/// seed prefix is predicted from everything before it, then revealed.
pub fn backtest(
    series: &TimeSeries,
    seed_len: usize,
    strategy: EvStrategy,
    method: Method,
) -> Result<BacktestResult> {
    let n = series.len();
    let min_seed = match method {
        Method::Evidential => 2,
        Method::Sma { k } => {
            if k == 0 {
                return Err(Error::EmptyWindow);
            }
            k
        }
    };
    if seed_len < min_seed {
        return Err(Error::SeriesTooShort { needed: min_seed, got: seed_len });
    }
    if n <= seed_len {
        return Err(Error::SeriesTooShort { needed: seed_len + 1, got: n });
    }

    let points = series.points();
    let mut predictions = Vec::with_capacity(n - seed_len);
    let mut per_update_ns = Vec::with_capacity(n - seed_len);
    let started = Instant::now();

    match method {
        Method::Evidential => {
            let (mut forecaster, mut next_prediction) =
                Forecaster::init(&series.prefix(seed_len), strategy)?;
            for point in &points[seed_len..] {
                predictions.push(PredictionRecord {
                    t: point.t(),
                    actual: point.y(),
                    predicted: next_prediction,
                });
                let step_started = Instant::now();
                let outcome = forecaster.update_at(point.t(), point.y());
                per_update_ns.push(step_started.elapsed().as_nanos() as u64);
                next_prediction = outcome?;
            }
            // The final update's forecast targets the value after the
            // series end; it is not scored.
        }
        Method::Sma { k } => {
            let values: Vec<f64> = series.values().collect();
            for (i, point) in points.iter().enumerate().skip(seed_len) {
                let step_started = Instant::now();
                let predicted = sma_predict(&values[..i], k)?;
                per_update_ns.push(step_started.elapsed().as_nanos() as u64);
                predictions.push(PredictionRecord {
                    t: point.t(),
                    actual: point.y(),
                    predicted,
                });
            }
        }
    }
    let elapsed = started.elapsed();

    let pred: Vec<f64> = predictions.iter().map(|r| r.predicted).collect();
    let truth: Vec<f64> = predictions.iter().map(|r| r.actual).collect();
    let metrics = compute_metrics(&pred, &truth)?;
    Ok(BacktestResult { predictions, seed_len, metrics, elapsed, per_update_ns })
}
