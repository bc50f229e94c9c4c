use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_pair, least_squares, ols, RegressionResult};
use crate::error::{Error, Result};

/// One row of the Dickey-Fuller critical-value table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRow {
    /// Sample size; `None` is the asymptotic row.
    pub n: Option<usize>,
    pub pct1: f64,
    pub pct5: f64,
    pub pct10: f64,
}

const fn row(n: Option<usize>, pct1: f64, pct5: f64, pct10: f64) -> CriticalRow {
    CriticalRow { n, pct1, pct5, pct10 }
}

/// Fuller's tau_mu critical values (regression with constant, no trend).
pub const TAU_MU_TABLE: [CriticalRow; 6] = [
    row(Some(25), -3.75, -3.00, -2.63),
    row(Some(50), -3.58, -2.93, -2.60),
    row(Some(100), -3.51, -2.89, -2.58),
    row(Some(250), -3.46, -2.88, -2.57),
    row(Some(500), -3.44, -2.87, -2.57),
    row(None, -3.43, -2.86, -2.57),
];

/// Sample sizes above this use the asymptotic row.
const ASYMPTOTIC_FROM: usize = 1000;

/// Table row for sample size `n`: the nearest tabulated N (ties go to the
/// smaller N), or the asymptotic row beyond 1000 observations.
pub fn critical_row(n: usize) -> CriticalRow {
    if n > ASYMPTOTIC_FROM {
        return TAU_MU_TABLE[TAU_MU_TABLE.len() - 1];
    }
    *TAU_MU_TABLE
        .iter()
        .filter_map(|r| r.n.map(|m| (r, m.abs_diff(n))))
        .min_by_key(|&(_, d)| d)
        .map(|(r, _)| r)
        .expect("table has finite rows")
}

/// Dickey-Fuller test outcome. Rejection means the unit-root null is
/// rejected, i.e. the series looks stationary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitRootResult {
    /// t-ratio on the lagged level.
    pub statistic: f64,
    /// Length of the tested series; selects the critical-value row.
    pub n: usize,
    /// Rows in the test regression.
    pub nobs: usize,
    pub lags: usize,
    pub critical_1pct: f64,
    pub critical_5pct: f64,
    pub critical_10pct: f64,
    pub reject_1pct: bool,
    pub reject_5pct: bool,
}

impl UnitRootResult {
    fn decide(statistic: f64, n: usize, nobs: usize, lags: usize) -> Self {
        let row = critical_row(n);
        Self {
            statistic,
            n,
            nobs,
            lags,
            critical_1pct: row.pct1,
            critical_5pct: row.pct5,
            critical_10pct: row.pct10,
            reject_1pct: statistic < row.pct1,
            reject_5pct: statistic < row.pct5,
        }
    }

    /// Decision for an externally computed statistic on `n` observations.
    pub fn from_statistic(statistic: f64, n: usize, lags: usize) -> Self {
        Self::decide(statistic, n, n.saturating_sub(1 + lags), lags)
    }
}

/// Augmented Dickey-Fuller test with a constant and no trend.
///
/// Regresses `dy_t` on `1, y_{t-1}, dy_{t-1}, ..., dy_{t-lags}` and reports
/// the t-ratio of the `y_{t-1}` coefficient against Fuller's tau_mu table.
pub fn adf_test(series: &[f64], lags: usize) -> Result<UnitRootResult> {
    let n = series.len();
    if n < lags + 10 {
        return Err(Error::domain(format!(
            "series of length {n} is too short for {lags} lags (need {})",
            lags + 10
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("series contains non-finite values"));
    }
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let nobs = n - 1 - lags;
    let k = 2 + lags;
    // row r is time t = lags + 1 + r, so dy_t = diff[t - 1]
    let design = DMatrix::from_fn(nobs, k, |r, c| {
        let t = lags + 1 + r;
        match c {
            0 => 1.0,
            1 => series[t - 1],
            j => diff[t - j],
        }
    });
    let target = DVector::from_iterator(nobs, (0..nobs).map(|r| diff[lags + r]));
    let fit = least_squares(&design, &target)?;
    let statistic = fit.beta[1] / fit.std_err[1];
    if !statistic.is_finite() {
        return Err(Error::domain("unit-root statistic is undefined for this series"));
    }
    Ok(UnitRootResult::decide(statistic, n, nobs, lags))
}

/// Engle-Granger two-step test.
///
/// Step 2 applies the raw Dickey-Fuller table to the step-1 residuals rather
/// than residual-based critical values, which makes it less conservative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CointegrationResult {
    pub step1: RegressionResult,
    pub step2: UnitRootResult,
    /// Step 1 fitted exactly, leaving no residual dynamics to test.
    pub perfect_fit: bool,
    pub cointegrated_5pct: bool,
}

/// Regresses `y` on `x` with an intercept, then runs [`adf_test`] on the
/// residuals.
pub fn engle_granger(x: &[f64], y: &[f64], lags: usize) -> Result<CointegrationResult> {
    check_pair(x, y, lags + 12)?;
    let step1 = ols(y, x, true)?;
    let ssr: f64 = step1.residuals.iter().map(|e| e * e).sum();
    let sst: f64 = {
        let m = y.iter().sum::<f64>() / y.len() as f64;
        y.iter().map(|v| (v - m) * (v - m)).sum()
    };
    let perfect_fit = ssr <= 1e-24 * sst;
    let step2 = if perfect_fit {
        UnitRootResult::from_statistic(f64::NEG_INFINITY, y.len(), lags)
    } else {
        adf_test(&step1.residuals, lags)?
    };
    Ok(CointegrationResult {
        cointegrated_5pct: step2.reject_5pct,
        perfect_fit,
        step1,
        step2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_row_250() {
        let r = critical_row(250);
        assert_eq!((r.pct1, r.pct5), (-3.46, -2.88));
        assert_eq!(critical_row(240).n, Some(250));
        assert_eq!(critical_row(175).n, Some(100));
        assert_eq!(critical_row(30).n, Some(25));
        assert_eq!(critical_row(5).n, Some(25));
        assert_eq!(critical_row(1000).n, Some(500));
        assert_eq!(critical_row(5000).n, None);
        for r in TAU_MU_TABLE {
            assert!(r.pct1 < r.pct5 && r.pct5 < r.pct10);
        }
    }

    #[test]
    fn reported_statistic_rejects_at_one_percent() {
        let r = UnitRootResult::from_statistic(-5.14, 250, 0);
        assert!(r.reject_1pct && r.reject_5pct);
        let edge = UnitRootResult::from_statistic(-2.88, 250, 0);
        assert!(!edge.reject_5pct);
    }

    #[test]
    fn too_short() {
        assert!(adf_test(&[1.0; 9], 0).is_err());
        assert!(adf_test(&(0..11).map(f64::from).collect::<Vec<_>>(), 2).is_err());
    }

    #[test]
    fn deterministic_ar1_matches_hand_regression() {
        // lags = 0 regression is simple OLS of dy on y_{t-1}
        let y: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64).sin() + 0.1 * i as f64).collect();
        let r = adf_test(&y, 0).unwrap();
        let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let lag = &y[..y.len() - 1];
        let fit = ols(&dy, lag, true).unwrap();
        let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
        let m = lag.iter().sum::<f64>() / lag.len() as f64;
        let sxx: f64 = lag.iter().map(|v| (v - m) * (v - m)).sum();
        let se = (ssr / (lag.len() - 2) as f64 / sxx).sqrt();
        assert!((r.statistic - fit.slope / se).abs() < 1e-10);
        assert_eq!(r.nobs, 39);
    }

    #[test]
    fn identical_series_are_trivially_cointegrated() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin() + i as f64).collect();
        let r = engle_granger(&x, &x, 0).unwrap();
        assert!(r.perfect_fit && r.cointegrated_5pct);
        assert!((r.step1.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn engle_granger_length_checks() {
        let x: Vec<f64> = (0..11).map(f64::from).collect();
        assert!(engle_granger(&x, &x, 0).is_err());
        assert!(engle_granger(&x[..10], &x, 0).is_err());
    }
}
