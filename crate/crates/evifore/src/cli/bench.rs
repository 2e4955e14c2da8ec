//! Streaming latency measurement: repeated continuous-prediction runs with
//! per-update timing around the update + predict pair.

use std::time::Instant;

use serde::Serialize;

use crate::domain::TimeSeries;
use crate::error::Result;
use crate::forecaster::{percentile_ns, Forecaster};
use crate::valuation::EvStrategy;

/// Updates executed before measurement starts, to warm caches and the
/// branch predictor.
pub const WARMUP_UPDATES: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct PerUpdateStats {
    pub p50_ns: u64,
    pub p99_ns: u64,
    pub samples: usize,
}

/// Latency report of one benchmark invocation.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub strategy: EvStrategy,
    pub seed_len: usize,
    pub updates_per_run: usize,
    pub repeats: usize,
    /// Wall-clock time of each full continuous-prediction run, in
    /// nanoseconds (timing only the forecasting loop).
    pub total_ns: Vec<u64>,
    pub total_secs_median: f64,
    pub per_update: PerUpdateStats,
}

/// Runs `repeats` continuous-prediction passes over `series`: initialize on
/// the first `seed_len` points, then one update + predict per remaining
/// point. Only the forecasting loop is timed.
pub fn run(
    series: &TimeSeries,
    seed_len: usize,
    strategy: EvStrategy,
    repeats: usize,
) -> Result<BenchReport> {
    let points = series.points();
    let updates = points.len().saturating_sub(seed_len);

    // Warmup pass, discarded.
    {
        let (mut forecaster, _) = Forecaster::init(&series.prefix(seed_len), strategy)?;
        for point in points[seed_len..].iter().take(WARMUP_UPDATES) {
            let _ = forecaster.update_at(point.t(), point.y());
        }
    }

    let mut total_ns = Vec::with_capacity(repeats);
    let mut samples = Vec::with_capacity(repeats * updates);
    for _ in 0..repeats {
        let (mut forecaster, _) = Forecaster::init(&series.prefix(seed_len), strategy)?;
        let run_started = Instant::now();
        for point in &points[seed_len..] {
            let step_started = Instant::now();
            let _ = forecaster.update_at(point.t(), point.y());
            samples.push(step_started.elapsed().as_nanos() as u64);
        }
        total_ns.push(run_started.elapsed().as_nanos() as u64);
    }

    let mut sorted_totals = total_ns.clone();
    sorted_totals.sort_unstable();
    let total_secs_median = sorted_totals[sorted_totals.len() / 2] as f64 / 1e9;
    Ok(BenchReport {
        strategy,
        seed_len,
        updates_per_run: updates,
        repeats,
        total_ns,
        total_secs_median,
        per_update: PerUpdateStats {
            p50_ns: percentile_ns(&samples, 50.0).unwrap_or(0),
            p99_ns: percentile_ns(&samples, 99.0).unwrap_or(0),
            samples: samples.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_covers_all_updates() {
        let series = TimeSeries::random_walk(504, 9);
        let report = run(&series, 4, EvStrategy::RatioOffset, 2).unwrap();
        assert_eq!(report.updates_per_run, 500);
        assert_eq!(report.total_ns.len(), 2);
        assert_eq!(report.per_update.samples, 1000);
        assert!(report.per_update.p50_ns <= report.per_update.p99_ns);
        assert!(report.total_secs_median > 0.0);
    }
}
