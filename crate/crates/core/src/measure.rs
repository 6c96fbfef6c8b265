//! Autocorrelation, power spectrum and support extraction.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sets::DistanceSet;
use crate::signal::{Autocorrelation, SparseSignal, C64};

/// Relative guard below which an autocorrelation sample counts as zero when
/// extracting the noiseless support (threshold 0).
pub const ZERO_GUARD: f64 = 1e-9;

/// `a_i = sum_j x_j conj(x_{i+j})`, enumerated over pairs of stored entries.
pub fn autocorrelation(x: &SparseSignal) -> Autocorrelation {
    let mut a = vec![C64::new(0.0, 0.0); x.n()];
    let e = x.entries();
    for (p, &(i, xi)) in e.iter().enumerate() {
        for &(j, xj) in &e[p..] {
            a[j - i] += xi * xj.conj();
        }
    }
    Autocorrelation::from_raw(a)
}

/// `|DFT_m(x zero-padded to m)|^2`, for `m >= 2n`.
pub fn power_spectrum(x: &SparseSignal, m: usize) -> Result<Vec<f64>> {
    if m < 2 * x.n() {
        return Err(Error::Dimension(format!(
            "transform length {m} is shorter than twice the signal length {}",
            x.n()
        )));
    }
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for &(i, v) in x.entries() {
        buf[i] = v;
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    Ok(buf.iter().map(|v| v.norm_sqr()).collect())
}

/// Lags whose magnitude reaches `threshold`.
///
/// With `threshold == 0` a lag is kept when `|a_i| > ZERO_GUARD * max_j |a_j|`.
pub fn support_of(a: &Autocorrelation, threshold: f64) -> Result<DistanceSet> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be >= 0, got {threshold}")));
    }
    let max = a.max_abs();
    if max == 0.0 {
        return Err(Error::EmptyMeasurement);
    }
    let keep: Vec<usize> = if threshold == 0.0 {
        let guard = ZERO_GUARD * max;
        (0..a.n()).filter(|&i| a.lag(i).norm() > guard).collect()
    } else {
        (0..a.n()).filter(|&i| a.lag(i).norm() >= threshold).collect()
    };
    if keep.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    Ok(DistanceSet::new(keep).expect("indices are increasing"))
}

/// All pairwise distances `|v_i - v_j|` of a point set, including 0.
pub fn distance_set(points: &[usize]) -> DistanceSet {
    let mut d = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2 + 1);
    for (p, &a) in points.iter().enumerate() {
        for &b in &points[p..] {
            d.push(a.abs_diff(b));
        }
    }
    DistanceSet::from_unsorted(d)
}
