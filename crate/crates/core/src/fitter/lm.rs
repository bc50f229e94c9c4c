//! Damped Gauss-Newton (Levenberg-Marquardt) with box constraints by
//! projection and a forward-difference Jacobian.

use nalgebra::{DMatrix, DVector};

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_FACTOR: f64 = 10.0;
const LAMBDA_MIN: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost at the start and after every accepted step.
    pub history: Vec<f64>,
}

pub(crate) struct Settings {
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the cost by less than this fraction.
    pub tolerance: f64,
    /// Stop once the cost falls to this level.
    pub cost_floor: f64,
    /// Largest accepted move per parameter; steps beyond it are damped further.
    /// Empty means unlimited.
    pub step_limits: Vec<f64>,
}

fn project(p: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in p.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `sum r_i(p)^2` starting from `start`.
///
/// `residuals(p, out)` writes the residual vector into `out`. Any non-finite
/// cost is treated as a rejected step.
pub(crate) fn minimize<F>(
    residuals: F,
    m: usize,
    start: &[f64],
    bounds: &[(f64, f64)],
    settings: &Settings,
) -> Outcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let k = start.len();
    let mut p = start.to_vec();
    project(&mut p, bounds);
    let mut r = vec![0.0; m];
    residuals(&p, &mut r);
    let mut cost = sum_sq(&r);
    let mut history = vec![cost];
    let mut lambda = LAMBDA_INIT;
    let mut converged = false;
    let mut iterations = 0;

    let mut r_step = vec![0.0; m];
    let mut trial = vec![0.0; k];
    let mut jac = DMatrix::<f64>::zeros(m, k);

    if !cost.is_finite() {
        return Outcome { params: p, cost, iterations, converged, history };
    }

    while iterations < settings.max_iterations {
        if cost <= settings.cost_floor {
            converged = true;
            break;
        }
        iterations += 1;

        for j in 0..k {
            let mut h = 1e-6 * p[j].abs().max(1.0);
            if p[j] + h > bounds[j].1 {
                h = -h;
            }
            trial.copy_from_slice(&p);
            trial[j] += h;
            residuals(&trial, &mut r_step);
            for i in 0..m {
                jac[(i, j)] = (r_step[i] - r[i]) / h;
            }
        }
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        let diag_max = (0..k).map(|i| normal[(i, i)]).fold(0.0, f64::max);
        if diag_max == 0.0 || grad.amax() == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            let mut damped = normal.clone();
            for i in 0..k {
                damped[(i, i)] += lambda * normal[(i, i)].max(1e-12 * diag_max);
            }
            let step = damped.cholesky().map(|c| c.solve(&(-&grad)));
            let step = step.filter(|st| {
                settings.step_limits.iter().zip(st.iter()).all(|(lim, v)| v.abs() <= *lim)
            });
            if let Some(step) = step {
                for j in 0..k {
                    trial[j] = p[j] + step[j];
                }
                project(&mut trial, bounds);
                residuals(&trial, &mut r_step);
                let trial_cost = sum_sq(&r_step);
                if trial_cost.is_finite() && trial_cost < cost {
                    let rel = (cost - trial_cost) / cost;
                    p.copy_from_slice(&trial);
                    std::mem::swap(&mut r, &mut r_step);
                    cost = trial_cost;
                    history.push(cost);
                    lambda = (lambda / LAMBDA_FACTOR).max(LAMBDA_MIN);
                    accepted = true;
                    if rel < settings.tolerance {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= LAMBDA_FACTOR;
        }
        if !accepted {
            // no descent direction left at any damping: a stationary point
            converged = true;
        }
        if converged {
            break;
        }
    }
    if cost <= settings.cost_floor {
        converged = true;
    }
    Outcome { params: p, cost, iterations, converged, history }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings { max_iterations: 200, tolerance: 1e-14, cost_floor: 1e-28, step_limits: Vec::new() }
    }

    #[test]
    fn fits_exponential_decay() {
        let ts: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let out = minimize(
            |p, r| {
                for ((ri, t), y) in r.iter_mut().zip(&ts).zip(&ys) {
                    *ri = p[0] * (-p[1] * t).exp() - y;
                }
            },
            ts.len(),
            &[1.0, 0.1],
            &[(0.0, 10.0), (0.0, 10.0)],
            &settings(),
        );
        assert!(out.converged);
        assert!((out.params[0] - 3.0).abs() < 1e-8);
        assert!((out.params[1] - 0.7).abs() < 1e-8);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_bounds() {
        // unconstrained minimum at p = -2
        let out = minimize(
            |p, r| r[0] = p[0] + 2.0,
            1,
            &[5.0],
            &[(0.0, 10.0)],
            &settings(),
        );
        assert_eq!(out.params[0], 0.0);
        assert!(out.converged);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let ts: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let out = minimize(
            |p, r| {
                for (ri, t) in r.iter_mut().zip(&ts) {
                    *ri = p[0] * (-p[1] * t).exp() - (1.0 + t).sin();
                }
            },
            ts.len(),
            &[1.0, 0.1],
            &[(-10.0, 10.0), (-10.0, 10.0)],
            &Settings { max_iterations: 1, tolerance: 1e-300, cost_floor: 0.0, step_limits: Vec::new() },
        );
        assert_eq!(out.iterations, 1);
        assert!(!out.converged);
    }
}
