use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nonlinearity coefficient satisfied by the positive-pulse soliton solutions.
pub const DEFAULT_NONLINEARITY: f64 = 6.0;

const MIN_NX: usize = 7;
const MIN_NT: usize = 3;

/// Field `P(x, t)` sampled on a uniform rectangular grid.
///
/// Values are stored one time slice after another: index `it * nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_min: f64,
    t_max: f64,
    nt: usize,
    values: Vec<f64>,
}

impl FieldGrid {
    /// Zero-filled grid. Requires at least 7 points in x and 3 in t so the
    /// residual stencils fit.
    pub fn new(x_min: f64, x_max: f64, nx: usize, t_min: f64, t_max: f64, nt: usize) -> Result<Self> {
        if ![x_min, x_max, t_min, t_max].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("grid bounds must be finite"));
        }
        if x_max <= x_min || t_max <= t_min {
            return Err(Error::domain("grid bounds must satisfy min < max"));
        }
        if nx < MIN_NX || nt < MIN_NT {
            return Err(Error::domain(format!(
                "grid needs nx >= {MIN_NX} and nt >= {MIN_NT}, got {nx}x{nt}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            t_min,
            t_max,
            nt,
            values: vec![0.0; nx * nt],
        })
    }

    /// Grid centered on `(x_center, t_center)` with the given spacings.
    pub fn with_spacing(
        x_center: f64,
        half_nx: usize,
        dx: f64,
        t_center: f64,
        half_nt: usize,
        dt: f64,
    ) -> Result<Self> {
        let hx = half_nx as f64 * dx;
        let ht = half_nt as f64 * dt;
        Self::new(
            x_center - hx,
            x_center + hx,
            2 * half_nx + 1,
            t_center - ht,
            t_center + ht,
            2 * half_nt + 1,
        )
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.nt - 1) as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        if ix == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + ix as f64 * self.dx()
        }
    }

    pub fn t(&self, it: usize) -> f64 {
        if it == self.nt - 1 {
            self.t_max
        } else {
            self.t_min + it as f64 * self.dt()
        }
    }

    pub fn get(&self, ix: usize, it: usize) -> f64 {
        self.values[it * self.nx + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One time slice.
    pub fn row(&self, it: usize) -> &[f64] {
        &self.values[it * self.nx..(it + 1) * self.nx]
    }

    /// Overwrites every value with `f(x, t)`. Time slices are filled in
    /// parallel; each value depends only on its own coordinates.
    pub fn fill<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let xs: Vec<f64> = (0..self.nx).map(|i| self.x(i)).collect();
        let ts: Vec<f64> = (0..self.nt).map(|i| self.t(i)).collect();
        self.values
            .par_chunks_mut(self.nx)
            .zip(ts.par_iter())
            .for_each(|(row, &t)| {
                for (v, &x) in row.iter_mut().zip(&xs) {
                    *v = f(x, t);
                }
            });
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Range(format!(
                "non-finite field value at x={}, t={}",
                xs[i % self.nx],
                ts[i / self.nx]
            )));
        }
        Ok(())
    }

    /// Trapezoid integral over x of time slice `it`.
    pub fn integrate_x(&self, it: usize) -> f64 {
        let row = self.row(it);
        let inner: f64 = row[1..row.len() - 1].iter().sum();
        self.dx() * (inner + 0.5 * (row[0] + row[row.len() - 1]))
    }

    /// `(x, value)` of the largest value in time slice `it`.
    pub fn argmax_x(&self, it: usize) -> (f64, f64) {
        self.row(it)
            .iter()
            .enumerate()
            .fold((self.x(0), f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (self.x(i), v)
                } else {
                    best
                }
            })
    }
}

/// Maximum over interior grid points of
/// `|P_t + coeff P P_x + P_xxx + c1|`.
///
/// Derivatives use second-order central differences: two-point for `P_t` and
/// `P_x`, five-point for `P_xxx`. Points within two cells of an x boundary or
/// one cell of a t boundary are skipped.
pub fn kdv_residual(grid: &FieldGrid, c1: f64, nonlinearity_coeff: f64) -> Result<f64> {
    if grid.nx < MIN_NX || grid.nt < MIN_NT {
        return Err(Error::domain("grid too small for residual stencils"));
    }
    if !(c1.is_finite() && nonlinearity_coeff.is_finite()) {
        return Err(Error::domain("residual coefficients must be finite"));
    }
    let dx = grid.dx();
    let dt = grid.dt();
    let p = |ix: usize, it: usize| grid.get(ix, it);
    let mut worst: f64 = 0.0;
    for it in 1..grid.nt - 1 {
        for ix in 2..grid.nx - 2 {
            let pt = (p(ix, it + 1) - p(ix, it - 1)) / (2.0 * dt);
            let px = (p(ix + 1, it) - p(ix - 1, it)) / (2.0 * dx);
            let pxxx = (p(ix + 2, it) - 2.0 * p(ix + 1, it) + 2.0 * p(ix - 1, it)
                - p(ix - 2, it))
                / (2.0 * dx * dx * dx);
            let r = (pt + nonlinearity_coeff * p(ix, it) * px + pxxx + c1).abs();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(FieldGrid::new(0.0, 1.0, 6, 0.0, 1.0, 3).is_err());
        assert!(FieldGrid::new(0.0, 1.0, 7, 0.0, 1.0, 2).is_err());
        assert!(FieldGrid::new(1.0, 0.0, 7, 0.0, 1.0, 3).is_err());
        assert!(FieldGrid::new(0.0, f64::NAN, 7, 0.0, 1.0, 3).is_err());
        let g = FieldGrid::new(-1.0, 1.0, 201, 0.0, 2.0, 21).unwrap();
        assert!((g.dx() - 0.01).abs() < 1e-15);
        assert!((g.dt() - 0.1).abs() < 1e-15);
        assert_eq!(g.x(200), 1.0);
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let mut g = FieldGrid::new(0.0, 1.0, 11, 0.0, 1.0, 5).unwrap();
        g.fill(|_, _| 3.25).unwrap();
        assert_eq!(kdv_residual(&g, 0.0, -6.0).unwrap(), 0.0);
        assert_eq!(kdv_residual(&g, 0.0, 6.0).unwrap(), 0.0);
        assert_eq!(kdv_residual(&g, 0.5, 6.0).unwrap(), 0.5);
    }

    #[test]
    fn fill_rejects_non_finite() {
        let mut g = FieldGrid::new(0.0, 1.0, 7, 0.0, 1.0, 3).unwrap();
        assert!(matches!(g.fill(|x, _| 1.0 / (x - x)), Err(Error::Range(_))));
    }

    #[test]
    fn stencils_are_exact_on_cubics() {
        // P = x^3 + t^2: P_t = 2t, P_x = 3x^2, P_xxx = 6
        let mut g = FieldGrid::new(-1.0, 1.0, 41, 0.0, 1.0, 11).unwrap();
        g.fill(|x, t| x * x * x + t * t).unwrap();
        let c1 = 0.0;
        let r = kdv_residual(&g, c1, 0.0).unwrap();
        // residual = max |2t + 6| over interior t in [0.1, 0.9]
        assert!((r - (2.0 * 0.9 + 6.0)).abs() < 1e-9, "{r}");
    }
}
