//! Closed-form solutions of the KdV family and the sech² pulse model.
//!
//! The solutions here are positive pulses `P = 2 d²/dx² log F`. They satisfy
//!
//! ```text
//! P_t + 6 P P_x + P_xxx = 0
//! ```
//!
//! which is why [`DEFAULT_NONLINEARITY`] is `+6`. [`kdv_residual`] takes the
//! coefficient as a parameter so other sign conventions can be probed.

mod grid;
mod hirota;
mod train;

pub use grid::{kdv_residual, FieldGrid, DEFAULT_NONLINEARITY};
pub use hirota::{
    hirota_f, hirota_log_f, n_soliton_field, n_soliton_value, phase_shift, SolitonSpec, EXPONENT_CLAMP,
    MAX_SOLITONS,
};
pub use train::{ratio_law, sech2_train, PairRatio, Pulse, RatioReport, WaveTrain};

use crate::error::{Error, Result};

/// `sech²(x)`, evaluated without overflow for large `|x|`.
#[inline]
pub fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Accelerating single soliton
///
/// `P = 2 (κ/2)² sech²[(κ/2)(x - 4(κ/2)² t + (c1/2) t²)] - c1 t`.
///
/// With `c1 = 0` this is a pulse of height `κ²/2` moving at speed `κ²`.
pub fn single_soliton(kappa: f64, c1: f64, x: f64, t: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
    }
    if !(c1.is_finite() && x.is_finite() && t.is_finite()) {
        return Err(Error::domain("soliton arguments must be finite"));
    }
    Ok(single_soliton_unchecked(kappa, c1, x, t))
}

#[inline]
fn single_soliton_unchecked(kappa: f64, c1: f64, x: f64, t: f64) -> f64 {
    let h = 0.5 * kappa;
    let phase = h * (x - 4.0 * h * h * t + 0.5 * c1 * t * t);
    2.0 * h * h * sech2(phase) - c1 * t
}

/// Fills a copy of `grid` with [`single_soliton`] values.
pub fn single_soliton_field(kappa: f64, c1: f64, grid: &FieldGrid) -> Result<FieldGrid> {
    single_soliton(kappa, c1, grid.x_min(), grid.t_min())?;
    let mut out = grid.clone();
    out.fill(|x, t| single_soliton_unchecked(kappa, c1, x, t))?;
    Ok(out)
}

fn check_logistic(l: f64, k: f64, t0: f64, t: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("logistic capacity must be positive, got {l}")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::domain(format!("logistic rate must be positive, got {k}")));
    }
    if !(t0.is_finite() && t.is_finite()) {
        return Err(Error::domain("logistic arguments must be finite"));
    }
    Ok(())
}

/// Logistic curve `L / (1 + exp(-k (t - t0)))`.
pub fn logistic(l: f64, k: f64, t0: f64, t: f64) -> Result<f64> {
    check_logistic(l, k, t0, t)?;
    Ok(l / (1.0 + (-k * (t - t0)).exp()))
}

/// Derivative of [`logistic`], which is a single soliton profile:
/// `(L k / 4) sech²[k (t - t0) / 2]`.
pub fn logistic_derivative(l: f64, k: f64, t0: f64, t: f64) -> Result<f64> {
    check_logistic(l, k, t0, t)?;
    Ok(0.25 * l * k * sech2(0.5 * k * (t - t0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech2_matches_cosh_form() {
        for &x in &[-30.0, -3.0, -0.5, 0.0, 0.1, 2.0, 17.0] {
            let direct = 1.0 / f64::cosh(x).powi(2);
            assert!((sech2(x) - direct).abs() <= 1e-15 * direct.max(1.0));
        }
        assert_eq!(sech2(1e6), 0.0);
    }

    #[test]
    fn single_soliton_examples() {
        assert_eq!(single_soliton(2.0, 0.0, 0.0, 0.0).unwrap(), 2.0);
        assert!((single_soliton(2.0, 0.0, 4.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((single_soliton(2.0, 1.0, 3.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(single_soliton(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(single_soliton(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(single_soliton(1.0, 0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn peak_moves_at_kappa_squared() {
        let kappa = 1.5;
        let dx = 0.01;
        for &t in &[0.0, 1.0, 2.5] {
            let (best, _) = (0..4000)
                .map(|i| -5.0 + i as f64 * dx)
                .map(|x| (x, single_soliton(kappa, 0.0, x, t).unwrap()))
                .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
            assert!((best - kappa * kappa * t).abs() <= dx, "t={t} peak at {best}");
        }
    }

    #[test]
    fn logistic_derivative_examples() {
        assert_eq!(logistic_derivative(1.0, 1.0, 0.0, 0.0).unwrap(), 0.25);
        assert_eq!(logistic_derivative(4.0, 2.0, 5.0, 5.0).unwrap(), 2.0);
        assert!(logistic_derivative(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(logistic_derivative(1.0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn logistic_derivative_matches_central_difference() {
        let (l, k, t0) = (3.0, 0.7, 2.0);
        let h = 1e-5;
        for i in 0..200 {
            let t = -20.0 + 0.2 * i as f64;
            let num = (logistic(l, k, t0, t + h).unwrap() - logistic(l, k, t0, t - h).unwrap())
                / (2.0 * h);
            let exact = logistic_derivative(l, k, t0, t).unwrap();
            assert!((num - exact).abs() < 1e-8, "t={t}: {num} vs {exact}");
        }
    }

    #[test]
    fn logistic_derivative_integrates_to_capacity() {
        let (l, k, t0) = (7.0, 0.4, -3.0);
        let half = 40.0 / k;
        let n = 20_000;
        let h = 2.0 * half / n as f64;
        let f = |t: f64| logistic_derivative(l, k, t0, t).unwrap();
        // composite Simpson
        let mut s = f(t0 - half) + f(t0 + half);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(t0 - half + i as f64 * h);
        }
        let integral = s * h / 3.0;
        assert!((integral - l).abs() / l < 1e-6, "{integral}");
    }
}
