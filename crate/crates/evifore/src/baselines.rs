//! Simple moving average baseline.

use crate::error::{Error, Result};

/// Window configuration for the moving-average baseline. `k = 1` is the
/// naive last-value forecaster used in the comparison tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmaConfig {
    k: usize,
}

impl SmaConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Unweighted mean of the `k` most recent observations.
    pub fn predict(&self, history: &[f64]) -> Result<f64> {
        sma_predict(history, self.k)
    }
}

/// Unweighted mean of the last `k` values of `history`.
pub fn sma_predict(history: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::EmptyWindow);
    }
    if history.len() < k {
        return Err(Error::SeriesTooShort { needed: k, got: history.len() });
    }
    let window = &history[history.len() - k..];
    Ok(window.iter().sum::<f64>() / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_returns_last_value() {
        assert_eq!(sma_predict(&[10.0, 12.0, 15.0], 1).unwrap(), 15.0);
    }

    #[test]
    fn two_point_mean() {
        assert_eq!(sma_predict(&[10.0, 20.0], 2).unwrap(), 15.0);
    }

    #[test]
    fn short_history_rejected() {
        assert!(matches!(
            sma_predict(&[1.0], 2),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(sma_predict(&[1.0], 0), Err(Error::EmptyWindow)));
        assert!(SmaConfig::new(0).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn prediction_stays_within_window_bounds(
                history in proptest::collection::vec(0.1f64..1e4, 1..50),
                k_seed in 1usize..50,
            ) {
                let k = 1 + k_seed % history.len();
                let p = sma_predict(&history, k).unwrap();
                let window = &history[history.len() - k..];
                let min = window.iter().cloned().fold(f64::MAX, f64::min);
                let max = window.iter().cloned().fold(f64::MIN, f64::max);
                prop_assert!(p >= min - 1e-9 && p <= max + 1e-9);
            }
        }
    }
}
