//! Correlation, least squares and unit-root statistics.

mod adf;

pub use adf::{
    adf_test, critical_row, engle_granger, CointegrationResult, CriticalRow, UnitRootResult,
    TAU_MU_TABLE,
};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min_len {
        return Err(Error::domain(format!(
            "need at least {min_len} observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("series contain non-finite values"));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::UndefinedCorrelation("a series has zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Simple linear regression of `y` on `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Ordinary least squares `y = intercept + slope x`.
///
/// Without an intercept the fit passes through the origin and `r_squared`
/// uses the uncentered total sum of squares.
pub fn ols(y: &[f64], x: &[f64], with_intercept: bool) -> Result<RegressionResult> {
    check_pair(x, y, 3)?;
    let (mx, my) = if with_intercept { (mean(x), mean(y)) } else { (0.0, 0.0) };
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let scale = x.iter().map(|v| v * v).sum::<f64>();
    if sxx <= 1e-14 * scale || sxx == 0.0 {
        return Err(Error::domain("regressor has no variation"));
    }
    if syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "dependent series has no variation; R² undefined".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = (1.0 - ssr / syy).clamp(0.0, 1.0);
    Ok(RegressionResult {
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

/// Multiple regression output used by the unit-root tests.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    pub beta: DVector<f64>,
    pub std_err: DVector<f64>,
    #[allow(dead_code)]
    pub ssr: f64,
}

/// Least squares via Householder QR with classical standard errors.
pub(crate) fn least_squares(design: &DMatrix<f64>, target: &DVector<f64>) -> Result<LeastSquares> {
    let (n, k) = design.shape();
    if n <= k {
        return Err(Error::domain(format!("{n} observations cannot identify {k} coefficients")));
    }
    let qr = design.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * max_diag) || max_diag == 0.0 {
        return Err(Error::domain("regression design is rank deficient"));
    }
    let qty = qr.q().transpose() * target;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::domain("singular regression"))?;
    let resid = target - design * &beta;
    let ssr = resid.norm_squared();
    let sigma2 = ssr / (n - k) as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::domain("singular regression"))?;
    // (X'X)^-1 = R^-1 R^-T, so var(beta_i) is the squared norm of row i of R^-1
    let std_err = DVector::from_iterator(
        k,
        (0..k).map(|i| (sigma2 * r_inv.row(i).norm_squared()).sqrt()),
    );
    Ok(LeastSquares { beta, std_err, ssr })
}
