//! Per-point evidential values and their mean, the global value, with O(1)
//! incremental maintenance for the default strategy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{TimePoint, TimeSeries};
use crate::error::{Error, Result};

/// How a historical point is extrapolated toward the next time step.
///
/// `RatioOffset` follows the arithmetic the worked reference tables use:
/// `EV_i = y_n + y_i / y_n`. It reproduces the published walkthrough
/// numbers and admits an O(1) running-sum form.
///
/// `SlopeExtrapolation` evaluates the definitional formula
/// `EV_i = y_n + (y_n - y_i) / (t_n - t_i) * (t_{n+1} - t_n)`, which behaves
/// better on constant or rescaled series but requires the retained history
/// (O(n) per query). The two deliberately disagree; they are never blended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvStrategy {
    #[default]
    RatioOffset,
    SlopeExtrapolation,
}

impl EvStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvStrategy::RatioOffset => "ratio",
            EvStrategy::SlopeExtrapolation => "slope",
        }
    }
}

impl fmt::Display for EvStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ratio" => Ok(EvStrategy::RatioOffset),
            "slope" => Ok(EvStrategy::SlopeExtrapolation),
            other => Err(format!("unknown strategy {other:?} (expected ratio or slope)")),
        }
    }
}

/// Running aggregates from which the global value is recovered in O(1)
/// under the ratio strategy: the sum of all values except the last, the
/// last value itself, and the trailing pair of timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationState {
    sum_prior: f64,
    y_last: f64,
    count: u64,
    t_last: f64,
    t_prev: f64,
}

impl Default for ValuationState {
    fn default() -> Self {
        Self::new()
    }
}

impl ValuationState {
    /// The empty state: nothing observed yet.
    pub fn new() -> Self {
        Self { sum_prior: 0.0, y_last: 0.0, count: 0, t_last: 0.0, t_prev: 0.0 }
    }

    /// Absorbs one observation. Constant work.
    pub fn update(&self, point: TimePoint) -> Result<Self> {
        if self.count >= 1 && point.t() <= self.t_last {
            return Err(Error::NonMonotoneTimestamp {
                t_prev: self.t_last,
                t_new: point.t(),
                row: None,
            });
        }
        Ok(if self.count == 0 {
            Self {
                sum_prior: 0.0,
                y_last: point.y(),
                count: 1,
                t_last: point.t(),
                t_prev: point.t(),
            }
        } else {
            Self {
                sum_prior: self.sum_prior + self.y_last,
                y_last: point.y(),
                count: self.count + 1,
                t_last: point.t(),
                t_prev: self.t_last,
            }
        })
    }

    /// Mean of the per-point evidential values under the ratio strategy,
    /// collapsed to `y_n + sum_prior / ((n-1) * y_n)`.
    pub fn global_value(&self) -> Result<f64> {
        if self.count < 2 {
            return Err(Error::SeriesTooShort { needed: 2, got: self.count as usize });
        }
        Ok(self.y_last + self.sum_prior / ((self.count - 1) as f64 * self.y_last))
    }

    pub fn sum_prior(&self) -> f64 {
        self.sum_prior
    }

    pub fn y_last(&self) -> f64 {
        self.y_last
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn t_last(&self) -> f64 {
        self.t_last
    }

    pub fn t_prev(&self) -> f64 {
        self.t_prev
    }

    /// Spacing between the two most recent timestamps; stands in for the
    /// not-yet-observed next spacing. Unit spacing for index time.
    pub fn trailing_spacing(&self) -> f64 {
        self.t_last - self.t_prev
    }
}

/// The evidential value of the `i`-th historical point (1-based,
/// `1 <= i <= n-1`) toward the step after the series end.
pub fn evidential_value(series: &TimeSeries, i: usize, strategy: EvStrategy) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    if i < 1 || i > n - 1 {
        return Err(Error::IndexOutOfRange { index: i, max: n - 1 });
    }
    let points = series.points();
    let last = points[n - 1];
    let point = points[i - 1];
    Ok(match strategy {
        EvStrategy::RatioOffset => last.y() + point.y() / last.y(),
        EvStrategy::SlopeExtrapolation => {
            let spacing = last.t() - points[n - 2].t();
            last.y() + (last.y() - point.y()) / (last.t() - point.t()) * spacing
        }
    })
}

/// Mean evidential value over all historical points for the slope strategy.
/// One pass over the retained series.
pub fn slope_global_value(series: &TimeSeries) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let points = series.points();
    let last = points[n - 1];
    let spacing = last.t() - points[n - 2].t();
    let sum: f64 = points[..n - 1]
        .iter()
        .map(|p| last.y() + (last.y() - p.y()) / (last.t() - p.t()) * spacing)
        .sum();
    Ok(sum / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TimeSeries;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    fn example_series() -> TimeSeries {
        TimeSeries::from_values(&[10.0, 12.0, 11.0, 14.0, 10.0, 15.0]).unwrap()
    }

    fn state_of(series: &TimeSeries) -> ValuationState {
        series
            .points()
            .iter()
            .fold(ValuationState::new(), |s, &p| s.update(p).unwrap())
    }

    #[test]
    fn ratio_evidential_values_match_reference() {
        let s = example_series();
        assert_close(evidential_value(&s, 2, EvStrategy::RatioOffset).unwrap(), 15.8, 5e-5);
        let extended =
            TimeSeries::from_values(&[10.0, 12.0, 11.0, 14.0, 10.0, 15.0, 16.0]).unwrap();
        assert_close(
            evidential_value(&extended, 6, EvStrategy::RatioOffset).unwrap(),
            16.9375,
            5e-5,
        );
    }

    #[test]
    fn slope_evidential_value_follows_definition() {
        // Direct evaluation of the slope formula; differs from the ratio
        // strategy on the same point by design.
        let s = example_series();
        let ev = evidential_value(&s, 1, EvStrategy::SlopeExtrapolation).unwrap();
        assert_eq!(ev, 16.0);
    }

    #[test]
    fn constant_series_slope_ev_is_constant() {
        let s = TimeSeries::from_values(&[4.0; 4]).unwrap();
        for i in 1..=3 {
            assert_eq!(
                evidential_value(&s, i, EvStrategy::SlopeExtrapolation).unwrap(),
                4.0
            );
        }
        assert_eq!(slope_global_value(&s).unwrap(), 4.0);
    }

    #[test]
    fn index_bounds_checked() {
        let s = example_series();
        assert!(matches!(
            evidential_value(&s, 0, EvStrategy::RatioOffset),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            evidential_value(&s, 6, EvStrategy::RatioOffset),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn global_value_matches_reference() {
        let s = example_series();
        assert_close(state_of(&s).global_value().unwrap(), 15.76, 5e-3);
        let extended =
            TimeSeries::from_values(&[10.0, 12.0, 11.0, 14.0, 10.0, 15.0, 16.0]).unwrap();
        assert_close(state_of(&extended).global_value().unwrap(), 16.75, 5e-3);
    }

    #[test]
    fn two_point_global_value() {
        let s = TimeSeries::from_values(&[3.0, 5.0]).unwrap();
        assert_eq!(state_of(&s).global_value().unwrap(), 5.0 + 3.0 / 5.0);
    }

    #[test]
    fn update_bookkeeping() {
        let state = state_of(&example_series());
        assert_eq!(state.sum_prior(), 57.0);
        assert_eq!(state.y_last(), 15.0);
        assert_eq!(state.count(), 6);

        let next = state.update(TimePoint::new(7.0, 16.0).unwrap()).unwrap();
        assert_eq!(next.sum_prior(), 72.0);
        assert_eq!(next.y_last(), 16.0);
        assert_eq!(next.count(), 7);
        assert_close(next.global_value().unwrap(), 16.75, 1e-12);
    }

    #[test]
    fn first_point_initializes() {
        let state = ValuationState::new()
            .update(TimePoint::new(1.0, 42.0).unwrap())
            .unwrap();
        assert_eq!(state.sum_prior(), 0.0);
        assert_eq!(state.y_last(), 42.0);
        assert_eq!(state.count(), 1);
        assert!(state.global_value().is_err());
    }

    #[test]
    fn out_of_order_timestamp_rejected() {
        let state = state_of(&example_series());
        assert!(matches!(
            state.update(TimePoint::new(6.0, 9.0).unwrap()),
            Err(Error::NonMonotoneTimestamp { .. })
        ));
    }

    #[test]
    fn constant_series_ratio_global_value_is_c_plus_one() {
        // Documented consequence of the ratio formula, not a sensible
        // forecast: each EV is c + c/c.
        let s = TimeSeries::from_values(&[9.5; 12]).unwrap();
        assert_close(state_of(&s).global_value().unwrap(), 10.5, 1e-12);
    }

    #[test]
    fn strategy_round_trips_through_strings() {
        assert_eq!("ratio".parse::<EvStrategy>().unwrap(), EvStrategy::RatioOffset);
        assert_eq!(
            "slope".parse::<EvStrategy>().unwrap(),
            EvStrategy::SlopeExtrapolation
        );
        assert!("mean".parse::<EvStrategy>().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn incremental_global_value_equals_direct_mean(
                values in proptest::collection::vec(0.1f64..1e4, 2..200)
            ) {
                let series = TimeSeries::from_values(&values).unwrap();
                let state = state_of(&series);
                let n = series.len();
                let direct: f64 = (1..n)
                    .map(|i| evidential_value(&series, i, EvStrategy::RatioOffset).unwrap())
                    .sum::<f64>()
                    / (n - 1) as f64;
                let gv = state.global_value().unwrap();
                let rel = (gv - direct).abs() / direct.abs();
                prop_assert!(rel <= 1e-9, "rel error {rel}");
            }

            #[test]
            fn slope_values_are_homogeneous_in_scale(
                values in proptest::collection::vec(0.1f64..1e4, 2..60),
                lambda in 1e-3f64..1e3,
            ) {
                let series = TimeSeries::from_values(&values).unwrap();
                let scaled_values: Vec<f64> = values.iter().map(|v| v * lambda).collect();
                let scaled = TimeSeries::from_values(&scaled_values).unwrap();
                let gv = slope_global_value(&series).unwrap();
                let gv_scaled = slope_global_value(&scaled).unwrap();
                // The mean can cancel toward zero, so normalize by the
                // scale of the terms rather than the (possibly tiny) mean.
                let y_max = values.iter().cloned().fold(f64::MIN, f64::max);
                let denom = lambda * gv.abs().max(y_max);
                let rel = (gv_scaled - lambda * gv).abs() / denom;
                prop_assert!(rel <= 1e-12, "rel error {rel}");
            }
        }
    }
}
