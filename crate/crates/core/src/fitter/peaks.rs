use serde::Serialize;

use super::TimeSeries;
use crate::error::{Error, Result};

/// Centered moving average.
///
/// Near the ends the window shrinks symmetrically so every output stays
/// centered on its own sample; the first and last samples are unchanged.
pub fn smooth(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let n = series.len();
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::domain(format!("smoothing window must be odd, got {window}")));
    }
    if window > n {
        return Err(Error::domain(format!(
            "smoothing window {window} exceeds series length {n}"
        )));
    }
    let half = window / 2;
    let y = series.y();
    let out = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let slice = &y[i - h..=i + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect();
    TimeSeries::new(series.t().to_vec(), out, series.label())
}

/// A local maximum and its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub index: usize,
    pub t: f64,
    pub height: f64,
    pub prominence: f64,
}

/// Interior local maxima whose prominence is at least `min_prominence`,
/// ordered by time.
///
/// A flat-topped maximum is reported at its leftmost sample. Prominence is
/// the height above the higher of the two lowest points reached before the
/// signal climbs above the peak on either side (or hits the boundary).
pub fn detect_peaks(series: &TimeSeries, min_prominence: f64) -> Vec<Peak> {
    let y = series.y();
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let prominence = y[i] - left_base(y, i).max(right_base(y, j));
                if prominence >= min_prominence {
                    peaks.push(Peak {
                        index: i,
                        t: series.t()[i],
                        height: y[i],
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

fn left_base(y: &[f64], start: usize) -> f64 {
    let top = y[start];
    let mut lowest = top;
    for &v in y[..start].iter().rev() {
        if v > top {
            break;
        }
        lowest = lowest.min(v);
    }
    lowest
}

fn right_base(y: &[f64], end: usize) -> f64 {
    let top = y[end];
    let mut lowest = top;
    for &v in &y[end + 1..] {
        if v > top {
            break;
        }
        lowest = lowest.min(v);
    }
    lowest
}
