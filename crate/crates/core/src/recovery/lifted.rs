use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signal::{Autocorrelation, SparseSignal, C64};

/// Hermitian estimate of `x x*` restricted to the rows and columns of a
/// support. Row `p` corresponds to signal index `positions[p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMatrix {
    n: usize,
    positions: Vec<usize>,
    matrix: DMatrix<C64>,
    known: DMatrix<bool>,
}

impl LiftedMatrix {
    /// Wraps a Hermitian matrix; the lower triangle is overwritten with the
    /// conjugate of the upper one and the diagonal imaginary parts are cleared.
    pub fn new(n: usize, positions: Vec<usize>, mut matrix: DMatrix<C64>) -> Result<Self> {
        let k = positions.len();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, support has {k} elements",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("positions must be strictly increasing".into()));
        }
        if positions.last().is_some_and(|&p| p >= n) {
            return Err(Error::Dimension(format!("support exceeds signal length {n}")));
        }
        for i in 0..k {
            matrix[(i, i)].im = 0.0;
            for j in i + 1..k {
                matrix[(j, i)] = matrix[(i, j)].conj();
            }
        }
        Ok(Self {
            n,
            positions,
            matrix,
            known: DMatrix::from_element(k, k, false),
        })
    }

    pub(crate) fn with_known(mut self, known: DMatrix<bool>) -> Self {
        self.known = known;
        self
    }

    /// `x x*` over the support of `x`.
    pub fn from_signal(x: &SparseSignal) -> Self {
        let v: Vec<C64> = x.values();
        let k = v.len();
        let m = DMatrix::from_fn(k, k, |i, j| v[i] * v[j].conj());
        Self::new(x.n(), x.support(), m).expect("outer product is Hermitian")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn known_mask(&self) -> &DMatrix<bool> {
        &self.known
    }

    /// Entry at support positions `(p, q)` (indices into `positions`).
    pub fn entry(&self, p: usize, q: usize) -> C64 {
        self.matrix[(p, q)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.k()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.k() == 0 {
            return 0.0;
        }
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `s_d = sum_j X_{j, j+d}` for every lag `d < n`.
    pub fn lag_sums(&self) -> Vec<C64> {
        let mut s = vec![C64::new(0.0, 0.0); self.n];
        let u = &self.positions;
        for p in 0..u.len() {
            for q in p..u.len() {
                s[u[q] - u[p]] += self.matrix[(p, q)];
            }
        }
        s
    }

    /// Euclidean norm of `lag_sums - a` over all lags.
    pub fn constraint_residual(&self, a: &Autocorrelation) -> Result<f64> {
        if a.n() != self.n {
            return Err(Error::Dimension(format!(
                "autocorrelation length {} differs from signal length {}",
                a.n(),
                self.n
            )));
        }
        Ok(self
            .lag_sums()
            .iter()
            .zip(a.values())
            .map(|(s, v)| (s - v).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn frobenius_distance(&self, other: &LiftedMatrix) -> Result<f64> {
        if self.positions != other.positions {
            return Err(Error::Dimension("lifted matrices have different supports".into()));
        }
        Ok((&self.matrix - &other.matrix).norm())
    }

    /// Frobenius distance to the lift of `x`, with `x` moved into whichever
    /// orientation (shift to origin, or conjugate-flip then shift) matches
    /// the positions of this matrix. `None` if neither does.
    pub fn lift_error(&self, x: &SparseSignal) -> Option<f64> {
        let mut best: Option<f64> = None;
        for cand in [x.shifted_to_origin(), x.conj_flip().shifted_to_origin()] {
            let shift = self.positions.first().copied().unwrap_or(0);
            let Ok(cand) = cand.shifted(shift as isize) else {
                continue;
            };
            if cand.support() != self.positions || cand.n() != self.n {
                continue;
            }
            let d = self
                .frobenius_distance(&LiftedMatrix::from_signal(&cand))
                .expect("same support");
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::autocorrelation;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lift_reproduces_autocorrelation() {
        let x = SparseSignal::new(16, vec![(1, c(1.0, 0.5)), (4, c(-2.0, 0.0)), (11, c(0.3, -0.7))]).unwrap();
        let l = LiftedMatrix::from_signal(&x);
        assert!(l.constraint_residual(&autocorrelation(&x)).unwrap() < 1e-12);
        assert!((l.trace() - x.norm_sqr()).abs() < 1e-12);
        assert!(l.is_psd(1e-10));
        assert_eq!(l.lift_error(&x.conj_flip()), Some(0.0));
    }

    #[test]
    fn construction_checks() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(LiftedMatrix::new(4, vec![0], m.clone()).is_err());
        assert!(LiftedMatrix::new(4, vec![1, 0], m.clone()).is_err());
        assert!(LiftedMatrix::new(2, vec![0, 2], m.clone()).is_err());
        let l = LiftedMatrix::new(4, vec![0, 2], m).unwrap();
        assert!((l.min_eigenvalue() - 0.0).abs() < 1e-12);
    }
}
