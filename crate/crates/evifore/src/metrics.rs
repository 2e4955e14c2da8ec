//! Error measures over aligned prediction/truth sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five error measures over a backtest run.
///
/// Percentage metrics are reported multiplied by 100. NRMSE normalizes the
/// RMSE by the range of the truth sequence within the evaluated window; it
/// is `None` when that range is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub mad: f64,
    pub mape_pct: f64,
    pub rmse: f64,
    pub nrmse_pct: Option<f64>,
    pub smape_pct: f64,
}

/// Mean absolute difference.
pub fn mad(pred: &[f64], truth: &[f64]) -> Result<f64> {
    validate(pred, truth)?;
    let sum: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &y)| (p - y).abs())
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape_pct(pred: &[f64], truth: &[f64]) -> Result<f64> {
    validate(pred, truth)?;
    let sum: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &y)| (p - y).abs() / y)
        .sum();
    Ok(sum / pred.len() as f64 * 100.0)
}

/// Root mean square error.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    validate(pred, truth)?;
    let sum: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &y)| (p - y) * (p - y))
        .sum();
    Ok((sum / pred.len() as f64).sqrt())
}

/// RMSE normalized by the truth range, in percent. Errors with
/// [`Error::ZeroRange`] when all truth values coincide.
pub fn nrmse_pct(pred: &[f64], truth: &[f64]) -> Result<f64> {
    validate(pred, truth)?;
    let max = truth.iter().cloned().fold(f64::MIN, f64::max);
    let min = truth.iter().cloned().fold(f64::MAX, f64::min);
    if max <= min {
        return Err(Error::ZeroRange);
    }
    Ok(rmse(pred, truth)? / (max - min) * 100.0)
}

/// Symmetric mean absolute percentage error, in percent: the 2/N form with
/// the plain `pred + truth` denominator.
pub fn smape_pct(pred: &[f64], truth: &[f64]) -> Result<f64> {
    validate(pred, truth)?;
    let sum: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &y)| (p - y).abs() / (p + y))
        .sum();
    Ok(2.0 / pred.len() as f64 * sum * 100.0)
}

/// All five measures in one pass. NRMSE becomes `None` instead of failing
/// when the truth range is zero; every other metric is still reported.
pub fn compute_metrics(pred: &[f64], truth: &[f64]) -> Result<MetricsReport> {
    validate(pred, truth)?;
    let nrmse = match nrmse_pct(pred, truth) {
        Ok(v) => Some(v),
        Err(Error::ZeroRange) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        n: pred.len(),
        mad: mad(pred, truth)?,
        mape_pct: mape_pct(pred, truth)?,
        rmse: rmse(pred, truth)?,
        nrmse_pct: nrmse,
        smape_pct: smape_pct(pred, truth)?,
    })
}

fn validate(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &y in truth {
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::NonPositiveValue { value: y, row: None });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn perfect_forecast_scores_zero() {
        let v = [10.0, 11.0, 12.5];
        let report = compute_metrics(&v, &v).unwrap();
        assert_eq!(report.mad, 0.0);
        assert_eq!(report.mape_pct, 0.0);
        assert_eq!(report.rmse, 0.0);
        assert_eq!(report.nrmse_pct, Some(0.0));
        assert_eq!(report.smape_pct, 0.0);
    }

    #[test]
    fn single_point_hand_oracle() {
        let report = compute_metrics(&[11.0], &[10.0]).unwrap();
        assert_close(report.mad, 1.0, 1e-12);
        assert_close(report.mape_pct, 10.0, 1e-12);
        assert_close(report.rmse, 1.0, 1e-12);
        assert!(report.nrmse_pct.is_none());
        assert_close(report.smape_pct, 2.0 * (1.0 / 21.0) * 100.0, 1e-12);
    }

    #[test]
    fn two_point_hand_oracle_with_zero_range() {
        let pred = [12.0, 8.0];
        let truth = [10.0, 10.0];
        let report = compute_metrics(&pred, &truth).unwrap();
        assert_close(report.mad, 2.0, 1e-12);
        assert_close(report.rmse, 2.0, 1e-12);
        assert_close(report.mape_pct, 20.0, 1e-12);
        assert!(report.nrmse_pct.is_none());
        assert!(matches!(nrmse_pct(&pred, &truth), Err(Error::ZeroRange)));
        // (2/2) * (2/22 + 2/18) * 100
        assert_close(report.smape_pct, (1.0 / 11.0 + 1.0 / 9.0) * 100.0, 1e-12);
    }

    #[test]
    fn nrmse_uses_truth_range() {
        let pred = [11.0, 21.0];
        let truth = [10.0, 20.0];
        let r = rmse(&pred, &truth).unwrap();
        assert_close(nrmse_pct(&pred, &truth).unwrap(), r / 10.0 * 100.0, 1e-12);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            compute_metrics(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(compute_metrics(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(
            compute_metrics(&[1.0], &[0.0]),
            Err(Error::NonPositiveValue { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn paired() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            proptest::collection::vec((0.1f64..1e4, 0.1f64..1e4), 1..60)
                .prop_map(|pairs| pairs.into_iter().unzip())
        }

        proptest! {
            #[test]
            fn rmse_dominates_mad((pred, truth) in paired()) {
                let report = compute_metrics(&pred, &truth).unwrap();
                prop_assert!(report.rmse >= report.mad - 1e-12 * report.mad.abs());
            }

            #[test]
            fn joint_permutation_invariance(
                (pred, truth) in paired(),
                seed in 0usize..1000,
            ) {
                let n = pred.len();
                let mut order: Vec<usize> = (0..n).collect();
                // Simple deterministic shuffle.
                for i in (1..n).rev() {
                    order.swap(i, (seed * 31 + i * 17) % (i + 1));
                }
                let pred_p: Vec<f64> = order.iter().map(|&i| pred[i]).collect();
                let truth_p: Vec<f64> = order.iter().map(|&i| truth[i]).collect();
                let a = compute_metrics(&pred, &truth).unwrap();
                let b = compute_metrics(&pred_p, &truth_p).unwrap();
                prop_assert!((a.mad - b.mad).abs() <= 1e-9 * a.mad.max(1.0));
                prop_assert!((a.rmse - b.rmse).abs() <= 1e-9 * a.rmse.max(1.0));
                prop_assert!((a.mape_pct - b.mape_pct).abs() <= 1e-9 * a.mape_pct.max(1.0));
                prop_assert!((a.smape_pct - b.smape_pct).abs() <= 1e-9 * a.smape_pct.max(1.0));
            }

            #[test]
            fn smape_is_symmetric((pred, truth) in paired()) {
                // Swapping arguments permutes |p - y| and p + y termwise,
                // which are bit-identical, so the result is too. Truth-side
                // validation requires positive values on both sides here.
                let swapped = smape_pct(&truth, &pred).unwrap();
                prop_assert_eq!(smape_pct(&pred, &truth).unwrap(), swapped);
            }
        }
    }
}
