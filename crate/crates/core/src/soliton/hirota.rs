use serde::Serialize;

use super::grid::FieldGrid;
use crate::error::{Error, Result};

/// Largest number of solitons; the tau function has `2^N` terms.
pub const MAX_SOLITONS: usize = 12;

/// Magnitude limit for the exponents summed in [`hirota_f`].
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Parameters of an N-soliton tau function
///
/// ```text
/// F = exp(-(C/2) t x² + A x + B) * sum_mu exp(sum_i mu_i eta_i + sum_{i<j} mu_i mu_j A_ij)
/// eta_i = k_i x - k_i³ t,   exp(A_ij) = ((k_i - k_j) / (k_i + k_j))²
/// ```
///
/// The Gaussian prefactor defaults to 1 (`C = A = B = 0`); a nonzero `C`
/// adds `-2 C t` to the field and is not a KdV solution in general.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonSpec {
    wavenumbers: Vec<f64>,
    c1: f64,
    prefactor_c: f64,
    prefactor_a: f64,
    prefactor_b: f64,
}

impl SolitonSpec {
    pub fn new(wavenumbers: Vec<f64>) -> Result<Self> {
        if wavenumbers.is_empty() {
            return Err(Error::domain("at least one wavenumber is required"));
        }
        if wavenumbers.len() > MAX_SOLITONS {
            return Err(Error::domain(format!(
                "at most {MAX_SOLITONS} solitons are supported, got {}",
                wavenumbers.len()
            )));
        }
        if let Some(k) = wavenumbers.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::domain(format!("wavenumbers must be positive, got {k}")));
        }
        for (i, ki) in wavenumbers.iter().enumerate() {
            if wavenumbers[..i].contains(ki) {
                return Err(Error::Degenerate(format!(
                    "repeated wavenumber {ki}: phase shift undefined"
                )));
            }
        }
        Ok(Self {
            wavenumbers,
            c1: 0.0,
            prefactor_c: 0.0,
            prefactor_a: 0.0,
            prefactor_b: 0.0,
        })
    }

    pub fn with_c1(mut self, c1: f64) -> Result<Self> {
        if !c1.is_finite() {
            return Err(Error::domain("c1 must be finite"));
        }
        self.c1 = c1;
        Ok(self)
    }

    pub fn with_prefactor(mut self, c: f64, a: f64, b: f64) -> Result<Self> {
        if !(c.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::domain("prefactor constants must be finite"));
        }
        self.prefactor_c = c;
        self.prefactor_a = a;
        self.prefactor_b = b;
        Ok(self)
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }
    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }
    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn prefactor(&self) -> (f64, f64, f64) {
        (self.prefactor_c, self.prefactor_a, self.prefactor_b)
    }

    fn log_prefactor(&self, x: f64, t: f64) -> f64 {
        -0.5 * self.prefactor_c * t * x * x + self.prefactor_a * x + self.prefactor_b
    }

    /// Per-subset coefficients of the tau-function exponents. Term `mu`
    /// contributes `exp(slope * x - speed * t + shift)`.
    fn terms(&self) -> Vec<Term> {
        let k = &self.wavenumbers;
        let n = k.len();
        let mut shifts = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                shifts[i * n + j] = pair_shift(k[i], k[j]);
            }
        }
        (0u32..(1 << n))
            .map(|mask| {
                let on: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let mut term = Term::default();
                for (a, &i) in on.iter().enumerate() {
                    term.slope += k[i];
                    term.speed += k[i] * k[i] * k[i];
                    for &j in &on[a + 1..] {
                        term.shift += shifts[i * n + j];
                    }
                }
                term
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Term {
    slope: f64,
    speed: f64,
    shift: f64,
}

impl Term {
    #[inline]
    fn exponent(&self, x: f64, t: f64) -> f64 {
        self.slope * x - self.speed * t + self.shift
    }
}

#[inline]
fn pair_shift(ki: f64, kj: f64) -> f64 {
    2.0 * ((ki - kj).abs().ln() - (ki + kj).ln())
}

/// Phase shift `A_ij = ln[((k_i - k_j) / (k_i + k_j))²]`, always negative.
pub fn phase_shift(ki: f64, kj: f64) -> Result<f64> {
    if !(ki.is_finite() && ki > 0.0 && kj.is_finite() && kj > 0.0) {
        return Err(Error::domain(format!("wavenumbers must be positive, got {ki}, {kj}")));
    }
    if ki == kj {
        return Err(Error::Degenerate(format!("phase shift undefined for k_i = k_j = {ki}")));
    }
    Ok(pair_shift(ki, kj))
}

fn check_point(x: f64, t: f64) -> Result<()> {
    if !(x.is_finite() && t.is_finite()) {
        return Err(Error::domain("evaluation point must be finite"));
    }
    Ok(())
}

/// `ln F` evaluated by log-sum-exp; finite wherever `F` would overflow.
pub fn hirota_log_f(spec: &SolitonSpec, x: f64, t: f64) -> Result<f64> {
    check_point(x, t)?;
    let base = spec.log_prefactor(x, t);
    let exps: Vec<f64> = spec.terms().iter().map(|term| term.exponent(x, t)).collect();
    let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = exps.iter().map(|e| (e - m).exp()).sum();
    Ok(base + m + s.ln())
}

/// The tau function `F` itself.
///
/// Each term's full exponent (prefactor included) is clamped below at
/// `-EXPONENT_CLAMP` so `F` stays positive; an exponent above
/// `+EXPONENT_CLAMP` is a range error since `F` would no longer be
/// representable. Use [`hirota_log_f`] for large arguments.
pub fn hirota_f(spec: &SolitonSpec, x: f64, t: f64) -> Result<f64> {
    check_point(x, t)?;
    let base = spec.log_prefactor(x, t);
    let mut exps = Vec::with_capacity(1 << spec.len());
    for term in spec.terms() {
        let e = base + term.exponent(x, t);
        if e > EXPONENT_CLAMP {
            return Err(Error::Range(format!(
                "tau-function exponent {e} exceeds {EXPONENT_CLAMP} at x={x}, t={t}"
            )));
        }
        exps.push(e.max(-EXPONENT_CLAMP));
    }
    let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = exps.iter().map(|e| (e - m).exp()).sum();
    let f = m.exp() * s;
    if !f.is_finite() {
        return Err(Error::Range(format!("tau function overflowed at x={x}, t={t}")));
    }
    Ok(f)
}

/// Field `P = 2 d²/dx² ln F`.
///
/// Differentiating the exponential sum term by term gives
/// `F_xx/F - (F_x/F)² = Var_w(slope)`, the variance of the term slopes under
/// weights proportional to the terms, plus `-C t` from the prefactor. The
/// variance is computed after factoring out the largest term, so no
/// intermediate overflows.
pub fn n_soliton_field(spec: &SolitonSpec, grid: &FieldGrid) -> Result<FieldGrid> {
    let terms = spec.terms();
    let c = spec.prefactor_c;
    let mut out = grid.clone();
    out.fill(|x, t| 2.0 * (slope_variance(&terms, x, t) - c * t))?;
    Ok(out)
}

/// Pointwise [`n_soliton_field`].
pub fn n_soliton_value(spec: &SolitonSpec, x: f64, t: f64) -> Result<f64> {
    check_point(x, t)?;
    let terms = spec.terms();
    Ok(2.0 * (slope_variance(&terms, x, t) - spec.prefactor_c * t))
}

fn slope_variance(terms: &[Term], x: f64, t: f64) -> f64 {
    let m = terms
        .iter()
        .map(|term| term.exponent(x, t))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut w_sum = 0.0;
    let mut mean = 0.0;
    for term in terms {
        let w = (term.exponent(x, t) - m).exp();
        w_sum += w;
        mean += w * term.slope;
    }
    mean /= w_sum;
    let mut var = 0.0;
    for term in terms {
        let w = (term.exponent(x, t) - m).exp();
        let d = term.slope - mean;
        var += w * d * d;
    }
    var / w_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SolitonSpec::new(vec![]).is_err());
        assert!(SolitonSpec::new(vec![1.0, -2.0]).is_err());
        assert!(matches!(
            SolitonSpec::new(vec![1.0, 2.0, 1.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(SolitonSpec::new((1..=13).map(f64::from).collect()).is_err());
        assert!(SolitonSpec::new((1..=12).map(f64::from).collect()).is_ok());
    }

    #[test]
    fn phase_shift_examples() {
        assert!((phase_shift(1.0, 2.0).unwrap() - (1.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!((phase_shift(1.0, 3.0).unwrap() - 0.25f64.ln()).abs() < 1e-15);
        assert!(matches!(phase_shift(2.0, 2.0), Err(Error::Degenerate(_))));
        assert!(phase_shift(0.0, 2.0).is_err());
        assert_eq!(phase_shift(0.3, 1.7).unwrap(), phase_shift(1.7, 0.3).unwrap());
    }

    #[test]
    fn tau_function_examples() {
        let one = SolitonSpec::new(vec![1.0]).unwrap();
        assert_eq!(hirota_f(&one, 0.0, 0.0).unwrap(), 2.0);

        let two = SolitonSpec::new(vec![1.0, 2.0]).unwrap();
        let f2 = hirota_f(&two, 0.0, 0.0).unwrap();
        assert!((f2 - (3.0 + 1.0 / 9.0)).abs() < 1e-14, "{f2}");

        // 1 + e^0 * 3 + e^{A12} + e^{A13} + e^{A23} + e^{A12+A13+A23}
        let three = SolitonSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
        let (e12, e13, e23) = (1.0 / 9.0, 1.0 / 4.0, 1.0 / 25.0);
        let expected = 4.0 + e12 + e13 + e23 + e12 * e13 * e23;
        assert!((hirota_f(&three, 0.0, 0.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn tau_function_prefactor_and_range() {
        let s = SolitonSpec::new(vec![1.0]).unwrap().with_prefactor(0.0, 0.5, 1.0).unwrap();
        let f = hirota_f(&s, 2.0, 0.0).unwrap();
        assert!((f - (2.0f64).exp() * (1.0 + 2.0f64.exp())).abs() < 1e-12);

        let big = SolitonSpec::new(vec![1.0]).unwrap();
        assert!(matches!(hirota_f(&big, 800.0, 0.0), Err(Error::Range(_))));
        assert!(hirota_f(&big, -800.0, 0.0).unwrap() > 0.0);
        assert!((hirota_log_f(&big, 800.0, 0.0).unwrap() - 800.0).abs() < 1e-12);
    }

    #[test]
    fn one_soliton_field_is_the_closed_form() {
        let k = 2.0;
        let spec = SolitonSpec::new(vec![k]).unwrap();
        let grid = FieldGrid::new(-10.0, 10.0, 101, -1.0, 1.0, 5).unwrap();
        let f = n_soliton_field(&spec, &grid).unwrap();
        for it in 0..grid.nt() {
            for ix in 0..grid.nx() {
                let (x, t) = (grid.x(ix), grid.t(it));
                let closed = 0.5 * k * k * super::super::sech2(0.5 * (k * x - k * k * k * t));
                assert!((f.get(ix, it) - closed).abs() < 1e-12);
            }
        }
        assert!((n_soliton_value(&spec, 0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn prefactor_curvature_shifts_field() {
        let spec = SolitonSpec::new(vec![1.0]).unwrap().with_prefactor(0.3, 0.0, 0.0).unwrap();
        let plain = SolitonSpec::new(vec![1.0]).unwrap();
        let a = n_soliton_value(&spec, 0.4, 2.0).unwrap();
        let b = n_soliton_value(&plain, 0.4, 2.0).unwrap();
        assert!((a - (b - 2.0 * 0.3 * 2.0)).abs() < 1e-14);
    }
}
