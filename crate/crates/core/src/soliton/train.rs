use serde::{Deserialize, Serialize};

use super::sech2;
use crate::error::{Error, Result};

/// One `A sech²[B (t - T)]` pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    #[serde(rename = "A")]
    pub amplitude: f64,
    /// Inverse width, in reciprocal time units.
    #[serde(rename = "B")]
    pub width: f64,
    #[serde(rename = "T")]
    pub center: f64,
}

impl Pulse {
    pub fn new(amplitude: f64, width: f64, center: f64) -> Self {
        Self {
            amplitude,
            width,
            center,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * sech2(self.width * (t - self.center))
    }
}

/// Sum of sech² pulses over a constant baseline, with pulses kept sorted by
/// strictly increasing center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrain")]
pub struct WaveTrain {
    pulses: Vec<Pulse>,
    baseline: f64,
}

#[derive(Deserialize)]
struct RawTrain {
    pulses: Vec<Pulse>,
    #[serde(default)]
    baseline: f64,
}

impl TryFrom<RawTrain> for WaveTrain {
    type Error = Error;

    fn try_from(raw: RawTrain) -> Result<Self> {
        WaveTrain::new(raw.pulses, raw.baseline)
    }
}

impl WaveTrain {
    /// Validates and sorts the pulses by center.
    pub fn new(mut pulses: Vec<Pulse>, baseline: f64) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::domain("a wave train needs at least one pulse"));
        }
        if !baseline.is_finite() {
            return Err(Error::domain("baseline must be finite"));
        }
        for p in &pulses {
            if !(p.amplitude.is_finite() && p.amplitude > 0.0) {
                return Err(Error::domain(format!("pulse amplitude must be positive, got {}", p.amplitude)));
            }
            if !(p.width.is_finite() && p.width > 0.0) {
                return Err(Error::domain(format!("pulse width must be positive, got {}", p.width)));
            }
            if !p.center.is_finite() {
                return Err(Error::domain("pulse center must be finite"));
            }
        }
        pulses.sort_by(|a, b| a.center.total_cmp(&b.center));
        if let Some(w) = pulses.windows(2).find(|w| w[0].center == w[1].center) {
            return Err(Error::Degenerate(format!("two pulses share center {}", w[0].center)));
        }
        Ok(Self { pulses, baseline })
    }

    /// Builds a train from parallel amplitude, width and center slices.
    pub fn from_parts(amplitudes: &[f64], widths: &[f64], centers: &[f64], baseline: f64) -> Result<Self> {
        if amplitudes.len() != widths.len() || widths.len() != centers.len() {
            return Err(Error::domain("pulse parameter lists differ in length"));
        }
        let pulses = amplitudes
            .iter()
            .zip(widths)
            .zip(centers)
            .map(|((&a, &b), &t)| Pulse::new(a, b, t))
            .collect();
        Self::new(pulses, baseline)
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.baseline + self.pulses.iter().map(|p| p.eval(t)).sum::<f64>()
    }

    pub fn sample(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }
}

/// `baseline + sum_i A_i sech²[B_i (t - T_i)]`.
pub fn sech2_train(train: &WaveTrain, t: f64) -> f64 {
    train.eval(t)
}

/// Amplitude and time ratios for one pair of pulses `i < j` (by center).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRatio {
    pub i: usize,
    pub j: usize,
    /// `A_j / A_i`
    pub amplitude_ratio: f64,
    /// `T_j / T_i`
    pub time_ratio: f64,
    /// `(A_j - A_i) / (T_j - T_i)`
    pub slope: f64,
    /// `|amplitude_ratio - time_ratio| / |time_ratio|`
    pub relative_deviation: f64,
}

/// How closely a train follows `A_i / A_j = T_i / T_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub pairs: Vec<PairRatio>,
    /// Slopes between neighbouring pulses.
    pub adjacent_slopes: Vec<f64>,
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub conforms: bool,
}

impl RatioReport {
    pub fn pair(&self, i: usize, j: usize) -> Option<&PairRatio> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }
}

/// Compares every amplitude ratio with the matching time ratio. Centers are
/// measured from the time origin, which should be the originating
/// perturbation for the law to be meaningful.
pub fn ratio_law(train: &WaveTrain, tolerance: f64) -> Result<RatioReport> {
    let p = train.pulses();
    if p.len() < 2 {
        return Err(Error::domain("the ratio law needs at least two pulses"));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::domain(format!("invalid tolerance {tolerance}")));
    }
    if p.iter().any(|q| q.center == 0.0) {
        return Err(Error::domain("time ratios are undefined for a pulse centered at t = 0"));
    }
    let mut pairs = Vec::with_capacity(p.len() * (p.len() - 1) / 2);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let dt = p[j].center - p[i].center;
            if dt == 0.0 {
                return Err(Error::domain("duplicate pulse centers"));
            }
            let amplitude_ratio = p[j].amplitude / p[i].amplitude;
            let time_ratio = p[j].center / p[i].center;
            pairs.push(PairRatio {
                i,
                j,
                amplitude_ratio,
                time_ratio,
                slope: (p[j].amplitude - p[i].amplitude) / dt,
                relative_deviation: (amplitude_ratio - time_ratio).abs() / time_ratio.abs(),
            });
        }
    }
    let adjacent_slopes = pairs.iter().filter(|r| r.j == r.i + 1).map(|r| r.slope).collect();
    let max_relative_deviation = pairs
        .iter()
        .map(|r| r.relative_deviation)
        .fold(0.0, f64::max);
    Ok(RatioReport {
        pairs,
        adjacent_slopes,
        max_relative_deviation,
        tolerance,
        conforms: max_relative_deviation <= tolerance,
    })
}
