use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A length-`n` complex signal stored as its nonzero entries.
///
/// Entries are kept sorted by index; stored values are never exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    n: usize,
    entries: Vec<(usize, C64)>,
}

impl SparseSignal {
    /// Builds a signal from `(index, value)` pairs.
    ///
    /// Indices must be strictly increasing and below `n`. Exact zeros are
    /// dropped rather than rejected.
    pub fn new(n: usize, entries: Vec<(usize, C64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("signal length must be positive".into()));
        }
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "indices must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= n {
                return Err(Error::Dimension(format!("index {i} out of range for n = {n}")));
            }
        }
        if entries.iter().any(|(_, v)| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite signal value".into()));
        }
        let entries = entries.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect();
        Ok(Self { n, entries })
    }

    pub fn from_parts(n: usize, support: &[usize], values: &[C64]) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} indices but {} values",
                support.len(),
                values.len()
            )));
        }
        Self::new(n, support.iter().copied().zip(values.iter().copied()).collect())
    }

    /// Builds a signal from a dense vector, dropping exact zeros.
    pub fn from_dense(values: &[C64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(i, v)| (i, *v))
            .collect();
        Self::new(values.len(), entries)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, C64)] {
        &self.entries
    }

    /// Number of stored (nonzero) entries.
    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn values(&self) -> Vec<C64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn get(&self, index: usize) -> C64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or_default()
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Moves the signal by `offset` samples (negative moves towards 0).
    pub fn shifted(&self, offset: isize) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|&(i, v)| {
                let j = i as isize + offset;
                if j < 0 || j >= self.n as isize {
                    Err(Error::Dimension(format!(
                        "shift by {offset} moves index {i} outside [0, {})",
                        self.n
                    )))
                } else {
                    Ok((j as usize, v))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, entries })
    }

    /// Shifts so that the first stored index is 0.
    pub fn shifted_to_origin(&self) -> Self {
        let first = self.entries.first().map_or(0, |e| e.0);
        Self {
            n: self.n,
            entries: self.entries.iter().map(|&(i, v)| (i - first, v)).collect(),
        }
    }

    /// Conjugate-flip within the length-`n` frame: `y_i = conj(x_{n-1-i})`.
    pub fn conj_flip(&self) -> Self {
        let n = self.n;
        Self {
            n,
            entries: self.entries.iter().rev().map(|&(i, v)| (n - 1 - i, v.conj())).collect(),
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|&(i, v)| (i, v * c))
                .filter(|(_, v)| *v != C64::new(0.0, 0.0))
                .collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.1.im == 0.0)
    }

    /// Real-only mode: rejects any entry with a nonzero imaginary part.
    pub fn assert_real(&self) -> Result<()> {
        match self.entries.iter().find(|e| e.1.im != 0.0) {
            Some(&(i, v)) => Err(Error::InvalidInput(format!(
                "real-only mode: entry {i} has imaginary part {}",
                v.im
            ))),
            None => Ok(()),
        }
    }
}

/// Autocorrelation samples `a_0, ..., a_{n-1}` with
/// `a_i = sum_j x_j conj(x_{i+j})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    values: Vec<C64>,
}

impl Autocorrelation {
    /// Wraps measured values. `a_0` must be real (up to rounding) and
    /// nonnegative; its imaginary part is cleared.
    pub fn new(mut values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("autocorrelation must have at least one lag".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite autocorrelation value".into()));
        }
        let a0 = &mut values[0];
        if a0.im.abs() > 1e-9 * a0.re.abs().max(1.0) {
            return Err(Error::InvalidInput(format!("a_0 must be real, got {a0}")));
        }
        if a0.re < 0.0 {
            return Err(Error::InvalidInput(format!("a_0 must be nonnegative, got {}", a0.re)));
        }
        a0.im = 0.0;
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn lag(&self, i: usize) -> C64 {
        self.values.get(i).copied().unwrap_or_default()
    }

    pub fn energy(&self) -> f64 {
        self.values[0].re
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Euclidean distance to another autocorrelation of the same length.
    pub fn distance(&self, other: &Autocorrelation) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "autocorrelation lengths differ: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// The two-sided sequence `(a_0, ..., a_{n-1}, 0, conj(a_{n-1}), ..., conj(a_1))`
    /// of length `2n`. With `a_i = sum_j x_j conj(x_{i+j})` and the forward DFT,
    /// `DFT(two_sided)[f] = |X[-f]|^2`; the DFT of its conjugate is `|X[f]|^2`.
    pub fn two_sided(&self) -> Vec<C64> {
        let n = self.n();
        let mut out = Vec::with_capacity(2 * n);
        out.extend_from_slice(&self.values);
        out.push(C64::new(0.0, 0.0));
        out.extend(self.values[1..].iter().rev().map(|v| v.conj()));
        out
    }
}
