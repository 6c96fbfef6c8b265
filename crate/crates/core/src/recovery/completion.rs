//! Diagonal completion on a clique of known off-diagonal magnitudes:
//!
//! ```text
//! minimize   sum_i R_ii
//! subject to R_ii R_jj >= M_ij^2  for i != j,   R_ii >= 0
//! ```
//!
//! For rank-one consistent magnitudes `M_ij = |r_i||r_j|` the true diagonal
//! `|r_i|^2` is the unique optimizer whenever `sum_{j != i} |r_j|^2 > |r_i|^2`
//! for every `i`. Otherwise (always for `t = 2`) the optimizer sits elsewhere
//! and is found numerically.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for the rank-one consistency check.
const CONSISTENCY_TOL: f64 = 1e-6;

pub fn complete_diagonal(magnitudes: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let t = magnitudes.nrows();
    if magnitudes.ncols() != t {
        return Err(Error::Dimension("magnitude matrix must be square".into()));
    }
    if t < 2 {
        return Err(Error::InvalidInput("completion needs at least two vertices".into()));
    }
    let mut scale = 0.0f64;
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let m = magnitudes[(i, j)];
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "off-diagonal magnitude ({i}, {j}) must be positive, got {m}"
                )));
            }
            if (m - magnitudes[(j, i)]).abs() > CONSISTENCY_TOL * m {
                return Err(Error::InvalidInput("magnitude matrix must be symmetric".into()));
            }
            scale = scale.max(m);
        }
    }
    let m = magnitudes / scale;

    if t == 2 {
        let v = m[(0, 1)] * scale;
        return Ok(vec![v, v]);
    }

    let analytic = triangle_estimates(&m);
    for i in 0..t {
        for j in i + 1..t {
            let want = m[(i, j)] * m[(i, j)];
            if (analytic[i] * analytic[j] - want).abs() > CONSISTENCY_TOL * want {
                return Err(Error::CompletionInfeasible(format!(
                    "magnitudes are not rank-one consistent at ({i}, {j})"
                )));
            }
        }
    }
    let total: f64 = analytic.iter().sum();
    if analytic.iter().all(|&r| total - r > r) {
        return Ok(analytic.iter().map(|r| r * scale).collect());
    }
    let r = barrier_solve(&m, &analytic, tol)?;
    Ok(r.iter().map(|v| v * scale).collect())
}

/// Geometric mean over all triangles through `i` of `M_ij M_il / M_jl`.
fn triangle_estimates(m: &DMatrix<f64>) -> Vec<f64> {
    let t = m.nrows();
    (0..t)
        .map(|i| {
            let mut log_sum = 0.0;
            let mut count = 0usize;
            for j in 0..t {
                for l in j + 1..t {
                    if j != i && l != i {
                        log_sum += (m[(i, j)] * m[(i, l)] / m[(j, l)]).ln();
                        count += 1;
                    }
                }
            }
            (log_sum / count as f64).exp()
        })
        .collect()
}

/// Log-barrier Newton method in `y = ln R`, where the problem is convex:
/// minimize `sum exp(y_i)` subject to `y_i + y_j >= 2 ln M_ij`.
fn barrier_solve(m: &DMatrix<f64>, start: &[f64], tol: f64) -> Result<Vec<f64>> {
    let t = m.nrows();
    let mut pairs = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            pairs.push((i, j, 2.0 * m[(i, j)].ln()));
        }
    }
    let slack = |y: &DVector<f64>| -> Vec<f64> { pairs.iter().map(|&(i, j, b)| y[i] + y[j] - b).collect() };
    // strictly feasible start: every constraint gets slack of at least 1
    let mut y = DVector::from_iterator(t, start.iter().map(|r| r.ln() + 0.5));
    let objective = |y: &DVector<f64>, mu: f64| -> f64 {
        let g = slack(y);
        if g.iter().any(|&v| v <= 0.0) {
            return f64::INFINITY;
        }
        y.iter().map(|v| v.exp()).sum::<f64>() - mu * g.iter().map(|v| v.ln()).sum::<f64>()
    };

    let mut mu = 1.0;
    let tol = tol.max(1e-14);
    while mu * pairs.len() as f64 > tol * 1e-2 {
        for _ in 0..100 {
            let g = slack(&y);
            let mut grad = DVector::from_iterator(t, y.iter().map(|v| v.exp()));
            let mut hess = DMatrix::from_diagonal(&grad);
            for (&(i, j, _), &gv) in pairs.iter().zip(&g) {
                grad[i] -= mu / gv;
                grad[j] -= mu / gv;
                let h = mu / (gv * gv);
                hess[(i, i)] += h;
                hess[(j, j)] += h;
                hess[(i, j)] += h;
                hess[(j, i)] += h;
            }
            let Some(step) = hess.cholesky().map(|c| c.solve(&(-&grad))) else {
                return Err(Error::CompletionInfeasible("barrier Hessian is singular".into()));
            };
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= 1e-14 {
                break;
            }
            let f0 = objective(&y, mu);
            let mut s = 1.0;
            loop {
                let cand = &y + &step * s;
                if objective(&cand, mu) <= f0 - 0.25 * s * decrement {
                    y = cand;
                    break;
                }
                s *= 0.5;
                if s < 1e-12 {
                    break;
                }
            }
        }
        mu *= 0.1;
    }
    Ok(y.iter().map(|v| v.exp()).collect())
}
