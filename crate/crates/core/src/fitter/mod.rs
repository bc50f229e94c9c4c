//! Decomposition of a time series into a train of sech² pulses.
//!
//! [`fit_wave_train`] minimizes the unweighted sum of squared residuals
//! `sum_t (y(t) - f(t))^2` with `f(t) = b + sum_i A_i sech²[B_i (t - T_i)]`
//! by damped Gauss-Newton from several starting points. The first start comes
//! from peak detection; the rest jitter it with a seeded generator, so a fit
//! is reproducible bit for bit from `(series, config)`.

mod lm;
mod peaks;

pub use peaks::{detect_peaks, smooth, Peak};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::soliton::{ratio_law, sech2, Pulse, RatioReport, WaveTrain};
use crate::stats::{ols, pearson};

/// Ordered `(t, y)` samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    y: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub const MIN_LEN: usize = 4;

    pub fn new(t: Vec<f64>, y: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::domain(format!(
                "time and value columns differ in length: {} vs {}",
                t.len(),
                y.len()
            )));
        }
        if t.len() < Self::MIN_LEN {
            return Err(Error::domain(format!(
                "a time series needs at least {} samples, got {}",
                Self::MIN_LEN,
                t.len()
            )));
        }
        if t.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::domain("time series contains non-finite values"));
        }
        if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!(
                "time must be strictly increasing (sample {} at t={})",
                i + 1,
                t[i + 1]
            )));
        }
        Ok(Self {
            t,
            y,
            label: label.into(),
        })
    }

    /// Samples `train` at the given times.
    pub fn from_train(train: &WaveTrain, t: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let y = train.sample(&t);
        Self::new(t, y, label)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }
    pub fn y(&self) -> &[f64] {
        &self.y
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn len(&self) -> usize {
        self.t.len()
    }
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
    fn span(&self) -> f64 {
        self.t[self.t.len() - 1] - self.t[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    /// Independent `A_i`, `B_i`, `T_i` per pulse.
    #[default]
    Free,
    /// `A_i = c T_i` with one shared `c`, so amplitude ratios equal time
    /// ratios exactly.
    RatioLocked,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub n_waves: usize,
    pub max_iterations: usize,
    /// Relative cost decrease below which an accepted step ends a start.
    pub tolerance: f64,
    pub constraint_mode: ConstraintMode,
    pub multistarts: usize,
    pub seed: u64,
    /// Extra `(lo, hi)` limits per parameter, intersected with the defaults.
    /// Free mode orders parameters `A1, B1, T1, A2, ...`; ratio-locked mode
    /// uses `c, B1, T1, B2, T2, ...`. A free baseline comes last.
    pub bounds: Option<Vec<(f64, f64)>>,
    /// Odd moving-average window applied before fitting; 0 disables.
    pub smoothing_window: usize,
    pub free_baseline: bool,
    /// Tolerance handed to the ratio-law report.
    pub ratio_tolerance: f64,
    /// Minimum peak prominence for initialization, as a fraction of the data range.
    pub min_prominence_fraction: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_waves: 1,
            max_iterations: 500,
            tolerance: 1e-10,
            constraint_mode: ConstraintMode::Free,
            multistarts: 8,
            seed: 0,
            bounds: None,
            smoothing_window: 0,
            free_baseline: false,
            ratio_tolerance: 0.05,
            min_prominence_fraction: 0.01,
        }
    }
}

impl FitConfig {
    pub fn with_waves(n_waves: usize) -> Self {
        Self {
            n_waves,
            ..Self::default()
        }
    }

    fn n_params(&self) -> usize {
        let core = match self.constraint_mode {
            ConstraintMode::Free => 3 * self.n_waves,
            ConstraintMode::RatioLocked => 1 + 2 * self.n_waves,
        };
        core + usize::from(self.free_baseline)
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.n_waves == 0 {
            return Err(Error::domain("n_waves must be at least 1"));
        }
        if 3 * self.n_waves + 1 > len {
            return Err(Error::domain(format!(
                "{} waves need at least {} samples, series has {len}",
                self.n_waves,
                3 * self.n_waves + 1
            )));
        }
        if self.max_iterations == 0 || self.multistarts == 0 {
            return Err(Error::domain("max_iterations and multistarts must be positive"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if self.smoothing_window != 0 && (self.smoothing_window.is_multiple_of(2) || self.smoothing_window > len) {
            return Err(Error::domain(format!(
                "smoothing window must be odd and at most {len}, got {}",
                self.smoothing_window
            )));
        }
        if !(self.ratio_tolerance.is_finite() && self.ratio_tolerance >= 0.0) {
            return Err(Error::domain("ratio tolerance must be non-negative"));
        }
        if !(self.min_prominence_fraction.is_finite() && self.min_prominence_fraction >= 0.0) {
            return Err(Error::domain("prominence fraction must be non-negative"));
        }
        if let Some(b) = &self.bounds {
            if b.len() != self.n_params() {
                return Err(Error::domain(format!(
                    "expected {} parameter bounds, got {}",
                    self.n_params(),
                    b.len()
                )));
            }
            if b.iter().any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
                return Err(Error::domain("each bound needs lo <= hi"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub train: WaveTrain,
    /// Sum of squared residuals against the fitted (possibly smoothed) data.
    pub cost: f64,
    /// Against the raw input series.
    pub r_squared: f64,
    pub pearson_r: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the start that produced the result.
    pub start: usize,
    pub ratio_report: Option<RatioReport>,
    /// Cost after each accepted optimizer step of the winning start.
    #[serde(skip)]
    pub cost_history: Vec<f64>,
}

/// Goodness-of-fit diagnostics of a model against observed data.
#[derive(Debug, Clone, PartialEq)]
pub struct Goodness {
    /// R² of the OLS regression of the data on the model.
    pub r_squared: f64,
    pub pearson_r: f64,
    /// `y - f(t)`.
    pub residuals: Vec<f64>,
}

pub fn goodness(series: &TimeSeries, train: &WaveTrain) -> Result<Goodness> {
    let model = train.sample(series.t());
    let pearson_r = pearson(series.y(), &model)?;
    let r_squared = ols(series.y(), &model, true)?.r_squared;
    let residuals = series.y().iter().zip(&model).map(|(y, f)| y - f).collect();
    Ok(Goodness {
        r_squared,
        pearson_r,
        residuals,
    })
}

/// Fits `config.n_waves` sech² pulses to `series`.
///
/// Failing to converge is not an error: the best start is returned with
/// `converged = false`.
pub fn fit_wave_train(series: &TimeSeries, config: &FitConfig) -> Result<FitResult> {
    config.validate(series.len())?;
    let target = if config.smoothing_window > 1 {
        smooth(series, config.smoothing_window)?
    } else {
        series.clone()
    };
    let layout = Layout::new(config, &target)?;
    let initial = initial_guess(&target, config, &layout);
    let y_scale = target.y().iter().map(|v| v * v).sum::<f64>();
    let settings = lm::Settings {
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
        cost_floor: 1e-28 * y_scale.max(f64::MIN_POSITIVE),
        step_limits: layout.step_limits(target.span()),
    };

    let outcomes: Vec<lm::Outcome> = (0..config.multistarts)
        .into_par_iter()
        .map(|s| {
            let start = if s == 0 {
                initial.clone()
            } else {
                jitter(&initial, &layout, config, &target, s)
            };
            let ts = target.t();
            let ys = target.y();
            lm::minimize(
                |p, r| {
                    for ((ri, &t), &y) in r.iter_mut().zip(ts).zip(ys) {
                        *ri = layout.eval(p, t) - y;
                    }
                },
                ts.len(),
                &start,
                &layout.bounds,
                &settings,
            )
        })
        .collect();

    let mut best: Option<(usize, &lm::Outcome, WaveTrain)> = None;
    for (i, out) in outcomes.iter().enumerate() {
        if !out.cost.is_finite() {
            continue;
        }
        let Ok(train) = layout.train(&out.params) else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, b, _)| out.cost < b.cost) {
            best = Some((i, out, train));
        }
    }
    let (start, out, train) =
        best.ok_or_else(|| Error::Range("no start produced a valid wave train".into()))?;

    let fit = goodness(series, &train)?;
    let ratio_report = if train.len() >= 2 {
        ratio_law(&train, config.ratio_tolerance).ok()
    } else {
        None
    };
    Ok(FitResult {
        cost: out.cost,
        r_squared: fit.r_squared,
        pearson_r: fit.pearson_r,
        iterations: out.iterations,
        converged: out.converged,
        start,
        ratio_report,
        cost_history: out.history.clone(),
        train,
    })
}

/// Maps the optimizer's flat parameter vector to pulses.
struct Layout {
    mode: ConstraintMode,
    n: usize,
    free_baseline: bool,
    bounds: Vec<(f64, f64)>,
}

const MIN_WIDTH: f64 = 1e-6;
const MAX_WIDTH: f64 = 1e6;
const HALF_MAX_PHASE: f64 = 0.881_373_587_019_543; // asech(1/sqrt 2)

impl Layout {
    fn new(config: &FitConfig, series: &TimeSeries) -> Result<Self> {
        let n = config.n_waves;
        let (t0, t1) = (series.t()[0], series.t()[series.len() - 1]);
        let span = series.span();
        let y_abs = series.y().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let a_floor = 1e-12 * y_abs.max(f64::MIN_POSITIVE);
        let center = (t0 - span, t1 + span);
        let mut bounds = Vec::with_capacity(config.n_params());
        match config.constraint_mode {
            ConstraintMode::Free => {
                for _ in 0..n {
                    bounds.push((a_floor, f64::INFINITY));
                    bounds.push((MIN_WIDTH, MAX_WIDTH));
                    bounds.push(center);
                }
            }
            ConstraintMode::RatioLocked => {
                if t1 + span <= 0.0 {
                    return Err(Error::domain(
                        "ratio-locked fits need positive pulse times; shift t so the origin precedes the data",
                    ));
                }
                let t_floor = 1e-9 * span;
                bounds.push((f64::MIN_POSITIVE, f64::INFINITY));
                for _ in 0..n {
                    bounds.push((MIN_WIDTH, MAX_WIDTH));
                    bounds.push((center.0.max(t_floor), center.1));
                }
            }
        }
        if config.free_baseline {
            bounds.push((f64::NEG_INFINITY, f64::INFINITY));
        }
        if let Some(extra) = &config.bounds {
            for (b, &(lo, hi)) in bounds.iter_mut().zip(extra) {
                *b = (b.0.max(lo), b.1.min(hi));
                if b.0 > b.1 {
                    return Err(Error::domain("parameter bounds do not intersect the defaults"));
                }
            }
        }
        Ok(Self {
            mode: config.constraint_mode,
            n,
            free_baseline: config.free_baseline,
            bounds,
        })
    }

    #[inline]
    fn pulse(&self, p: &[f64], i: usize) -> (f64, f64, f64) {
        match self.mode {
            ConstraintMode::Free => (p[3 * i], p[3 * i + 1], p[3 * i + 2]),
            ConstraintMode::RatioLocked => {
                let center = p[2 + 2 * i];
                (p[0] * center, p[1 + 2 * i], center)
            }
        }
    }

    fn baseline(&self, p: &[f64]) -> f64 {
        if self.free_baseline {
            p[p.len() - 1]
        } else {
            0.0
        }
    }

    #[inline]
    fn eval(&self, p: &[f64], t: f64) -> f64 {
        let mut v = self.baseline(p);
        for i in 0..self.n {
            let (a, b, c) = self.pulse(p, i);
            v += a * sech2(b * (t - c));
        }
        v
    }

    fn train(&self, p: &[f64]) -> Result<WaveTrain> {
        let pulses = (0..self.n)
            .map(|i| {
                let (a, b, c) = self.pulse(p, i);
                Pulse::new(a, b, c)
            })
            .collect();
        WaveTrain::new(pulses, self.baseline(p))
    }

    /// Per-step cap on center moves: half the mean pulse spacing. Without it
    /// a single Gauss-Newton step can carry a small pulse onto a big one.
    fn step_limits(&self, span: f64) -> Vec<f64> {
        let cap = 0.5 * span / self.n as f64;
        let mut lim = vec![f64::INFINITY; self.bounds.len()];
        for i in 0..self.n {
            match self.mode {
                ConstraintMode::Free => lim[3 * i + 2] = cap,
                ConstraintMode::RatioLocked => lim[2 + 2 * i] = cap,
            }
        }
        lim
    }

    /// Inverse of [`Layout::pulse`] for an initial train.
    fn pack(&self, pulses: &[(f64, f64, f64)], baseline: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.bounds.len());
        match self.mode {
            ConstraintMode::Free => {
                for &(a, b, c) in pulses {
                    p.extend([a, b, c]);
                }
            }
            ConstraintMode::RatioLocked => {
                let num: f64 = pulses.iter().map(|&(a, _, c)| a * c).sum();
                let den: f64 = pulses.iter().map(|&(_, _, c)| c * c).sum();
                p.push(if den > 0.0 { num / den } else { 1.0 });
                for &(_, b, c) in pulses {
                    p.extend([b, c]);
                }
            }
        }
        if self.free_baseline {
            p.push(baseline);
        }
        for (v, &(lo, hi)) in p.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
        p
    }
}

fn initial_guess(series: &TimeSeries, config: &FitConfig, layout: &Layout) -> Vec<f64> {
    let y = series.y();
    let n = config.n_waves;
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let baseline = if config.free_baseline { lo } else { 0.0 };
    let default_width = 4.0 * n as f64 / series.span();

    let mut candidates = detect_peaks(series, config.min_prominence_fraction * (hi - lo));
    candidates.sort_by(|a, b| b.prominence.total_cmp(&a.prominence).then(a.index.cmp(&b.index)));
    // a noise bump on the shoulder of a chosen peak barely dips before reaching it
    let mut peaks: Vec<Peak> = Vec::with_capacity(n);
    for c in candidates {
        if peaks.len() == n {
            break;
        }
        let valley = baseline + 0.75 * (c.height - baseline);
        let separated = peaks.iter().all(|s| {
            let (a, b) = (s.index.min(c.index), s.index.max(c.index));
            y[a..=b].iter().any(|&v| v < valley)
        });
        if separated {
            peaks.push(c);
        }
    }
    let mut pulses: Vec<(f64, f64, f64)> = peaks
        .iter()
        .map(|pk| {
            let amp = (pk.height - baseline).max(0.0);
            let width = half_width(series, pk.index, baseline + 0.5 * amp)
                .map_or(default_width, |hw| HALF_MAX_PHASE / hw);
            (amp, width, pk.t)
        })
        .collect();

    // not enough peaks: place the rest where the current guess misses most
    while pulses.len() < n {
        let model: Vec<f64> = series
            .t()
            .iter()
            .map(|&t| baseline + pulses.iter().map(|&(a, b, c)| a * sech2(b * (t - c))).sum::<f64>())
            .collect();
        let (idx, gap) = y
            .iter()
            .zip(&model)
            .map(|(a, b)| a - b)
            .enumerate()
            .filter(|(i, _)| pulses.iter().all(|p| p.2 != series.t()[*i]))
            .fold((0, f64::NEG_INFINITY), |best, (i, g)| if g > best.1 { (i, g) } else { best });
        pulses.push((gap.max(1e-3 * (hi - lo).max(f64::MIN_POSITIVE)), default_width, series.t()[idx]));
    }
    pulses.sort_by(|a, b| a.2.total_cmp(&b.2));
    layout.pack(&pulses, baseline)
}

/// Distance from the peak to where the series first falls below `level`,
/// averaged over the sides where that happens.
fn half_width(series: &TimeSeries, peak: usize, level: f64) -> Option<f64> {
    let (t, y) = (series.t(), series.y());
    let cross = |i: usize, j: usize| {
        // linear interpolation between sample i (above) and j (below)
        let f = (y[i] - level) / (y[i] - y[j]);
        t[i] + f * (t[j] - t[i])
    };
    let left = (0..peak).rev().find(|&i| y[i] < level).map(|i| t[peak] - cross(i + 1, i));
    let right = (peak + 1..y.len()).find(|&i| y[i] < level).map(|i| cross(i - 1, i) - t[peak]);
    match (left, right) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
    .filter(|w| *w > 0.0)
}

fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Perturbs the initial guess: centers by up to 10% of the mean pulse
/// spacing, amplitudes by up to 20%, widths by a factor up to 1.5.
fn jitter(initial: &[f64], layout: &Layout, config: &FitConfig, series: &TimeSeries, start: usize) -> Vec<f64> {
    let mut rng = start_rng(config.seed, start);
    let n = layout.n;
    let centers: Vec<f64> = (0..n).map(|i| layout.pulse(initial, i).2).collect();
    let spacing = if n > 1 {
        (centers[n - 1] - centers[0]) / (n - 1) as f64
    } else {
        series.span()
    };
    let spacing = if spacing > 0.0 { spacing } else { series.span() };
    let mut p = initial.to_vec();
    let shift_center = |v: &mut f64, rng: &mut ChaCha8Rng| *v += 0.1 * spacing * rng.random_range(-1.0..=1.0);
    let scale_width = |v: &mut f64, rng: &mut ChaCha8Rng| *v *= 1.5f64.powf(rng.random_range(-1.0..=1.0));
    match layout.mode {
        ConstraintMode::Free => {
            for i in 0..n {
                p[3 * i] *= 1.0 + 0.2 * rng.random_range(-1.0..=1.0);
                scale_width(&mut p[3 * i + 1], &mut rng);
                shift_center(&mut p[3 * i + 2], &mut rng);
            }
        }
        ConstraintMode::RatioLocked => {
            p[0] *= 1.0 + 0.2 * rng.random_range(-1.0..=1.0);
            for i in 0..n {
                scale_width(&mut p[1 + 2 * i], &mut rng);
                shift_center(&mut p[2 + 2 * i], &mut rng);
            }
        }
    }
    for (v, &(lo, hi)) in p.iter_mut().zip(&layout.bounds) {
        *v = v.clamp(lo, hi);
    }
    p
}
