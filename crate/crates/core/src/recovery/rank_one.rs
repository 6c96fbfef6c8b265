use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::{SparseSignal, C64};

use super::lifted::LiftedMatrix;

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;

/// Leading eigenpair of a Hermitian matrix by power iteration on `X + sigma I`
/// with `sigma = ||X||_F`, which makes the spectrum nonnegative so the
/// algebraically largest eigenvalue dominates.
pub fn leading_eigenpair(x: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let k = x.nrows();
    let sigma = x.norm();
    if k == 0 || sigma == 0.0 {
        return (0.0, DVector::from_element(k, C64::new(0.0, 0.0)));
    }
    let mut shifted = x.clone();
    for i in 0..k {
        shifted[(i, i)] += C64::new(sigma, 0.0);
    }
    // start from the column with the largest diagonal entry, plus a small
    // spread so the start is never orthogonal to the leading eigenvector
    let pivot = (0..k).max_by(|&i, &j| x[(i, i)].re.total_cmp(&x[(j, j)].re)).unwrap();
    let mut v: DVector<C64> = shifted.column(pivot).into_owned();
    for (i, e) in v.iter_mut().enumerate() {
        *e += C64::new(1e-3 * sigma / (1.0 + i as f64), 0.0);
    }
    v /= C64::new(v.norm(), 0.0);

    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &shifted * &v;
        let next_lambda = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        let next = w / C64::new(norm, 0.0);
        let delta = (next_lambda - lambda).abs();
        v = next;
        lambda = next_lambda;
        let residual = (&shifted * &v - &v * C64::new(lambda, 0.0)).norm();
        if delta <= POWER_TOL * lambda.abs().max(1e-300) && residual <= POWER_TOL * lambda.abs() {
            break;
        }
    }
    (lambda - sigma, v)
}

/// `x = sqrt(lambda_1) v_1`, placed at the matrix positions, with the global
/// phase chosen so the largest entry is real and positive.
pub fn rank_one_approx(x: &LiftedMatrix) -> Result<SparseSignal> {
    let (lambda, v) = leading_eigenpair(x.matrix());
    if !(lambda > 0.0) {
        return Err(Error::DegenerateMatrix(lambda));
    }
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let phase = pivot.conj() / pivot.norm();
    let scale = C64::new(lambda.sqrt(), 0.0) * phase;
    let entries: Vec<(usize, C64)> = x
        .positions()
        .iter()
        .zip(v.iter())
        .map(|(&p, &e)| (p, e * scale))
        .filter(|e| e.1 != C64::new(0.0, 0.0))
        .collect();
    SparseSignal::new(x.n(), entries)
}
