//! Value recovery on a known support through the lifted program
//!
//! ```text
//! minimize   trace(X)
//! subject to |a_d - sum_{u_q - u_p = d} X_pq| <= eta   for every lag d
//!            X Hermitian PSD, rows/columns restricted to the support
//! ```
//!
//! (`eta = 0` gives the equality program). The splitting solver is a relaxed
//! Douglas–Rachford iteration between the PSD cone (with the trace term) and
//! the lag constraints, whose projection is closed-form: each lag constraint
//! involves a disjoint group of entries, and the group-sum correction is
//! spread evenly over the group.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::distance_set;
use crate::sets::SupportSet;
use crate::signal::{Autocorrelation, C64};

use super::graph::direct_solve;
use super::lifted::LiftedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpMethod {
    /// Douglas–Rachford splitting only.
    Splitting,
    /// Exact reconstruction on `H(U)` when it applies, splitting otherwise.
    #[default]
    DirectGraph,
}

impl SdpMethod {
    pub fn tag(self) -> &'static str {
        match self {
            SdpMethod::Splitting => "splitting",
            SdpMethod::DirectGraph => "direct_graph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpSettings {
    /// Stopping tolerance on the constraint residual, relative to `a_0`.
    pub tol_feas: f64,
    /// Eigenvalue tolerance for declaring an output PSD.
    pub tol_psd: f64,
    pub max_iter: usize,
    pub method: SdpMethod,
    /// Over-relaxation factor of the splitting iteration, in `(0, 2)`.
    pub relaxation: f64,
    /// Weight of the trace term in the cone step, relative to `a_0`.
    pub step: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol_feas: 1e-7,
            tol_psd: 1e-8,
            max_iter: 50_000,
            method: SdpMethod::DirectGraph,
            relaxation: 1.6,
            step: 1e-3,
        }
    }
}

impl SdpSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feas > 0.0 && self.tol_psd > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidInput("relaxation must lie in (0, 2)".into()));
        }
        if !(self.step >= 0.0) {
            return Err(Error::InvalidInput("step must be nonnegative".into()));
        }
        Ok(())
    }
}

/// How a lifted solution was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// Constraint residual `||lag_sums(X) - a||_2` (absolute).
    pub residual: f64,
    pub trace: f64,
    pub iterations: usize,
    pub method: SdpMethod,
}

/// Pairs `(p, q)`, `p <= q`, grouped by lag `u_q - u_p`.
struct LagGroups {
    lags: Vec<usize>,
    members: Vec<Vec<(usize, usize)>>,
}

impl LagGroups {
    fn new(u: &[usize]) -> Self {
        let mut map: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for p in 0..u.len() {
            for q in p..u.len() {
                map.entry(u[q] - u[p]).or_default().push((p, q));
            }
        }
        let (lags, members) = map.into_iter().unzip();
        Self { lags, members }
    }

    fn sum(&self, g: usize, x: &DMatrix<C64>) -> C64 {
        self.members[g].iter().map(|&(p, q)| x[(p, q)]).sum()
    }
}

fn check_inputs(a: &Autocorrelation, u: &SupportSet, eta: f64) -> Result<()> {
    if u.span() >= a.n() {
        return Err(Error::Dimension(format!(
            "support span {} does not fit in {} lags",
            u.span(),
            a.n()
        )));
    }
    if !(eta >= 0.0) {
        return Err(Error::InvalidInput(format!("eta must be >= 0, got {eta}")));
    }
    if !(a.energy() > 0.0) {
        return Err(Error::EmptyMeasurement);
    }
    Ok(())
}

/// Lags that no support pair can produce must already be within the budget.
fn check_unreachable_lags(a: &Autocorrelation, u: &SupportSet, budget: f64) -> Result<()> {
    let reachable = distance_set(u);
    for (d, v) in a.values().iter().enumerate() {
        if !reachable.contains(d) && v.norm() > budget {
            return Err(Error::Infeasible {
                lag: d,
                excess: v.norm() - budget,
            });
        }
    }
    Ok(())
}

pub fn solve_sdp_equality(a: &Autocorrelation, u: &SupportSet, settings: &SdpSettings) -> Result<LiftedMatrix> {
    solve_sdp_equality_report(a, u, settings).map(|r| r.0)
}

pub fn solve_sdp_equality_report(
    a: &Autocorrelation,
    u: &SupportSet,
    settings: &SdpSettings,
) -> Result<(LiftedMatrix, SolveReport)> {
    settings.validate()?;
    check_inputs(a, u, 0.0)?;
    let scale = a.energy();
    check_unreachable_lags(a, u, settings.tol_feas * scale)?;

    if settings.method == SdpMethod::DirectGraph {
        if let Some(x) = direct_solve(u, a, &distance_set(u))? {
            let residual = x.constraint_residual(a)?;
            if residual <= settings.tol_feas * scale {
                let report = SolveReport {
                    residual,
                    trace: x.trace(),
                    iterations: 0,
                    method: SdpMethod::DirectGraph,
                };
                return Ok((x, report));
            }
        }
    }
    splitting(a, u, 0.0, settings)
}

pub fn solve_sdp_noisy(a: &Autocorrelation, u: &SupportSet, eta: f64, settings: &SdpSettings) -> Result<LiftedMatrix> {
    solve_sdp_noisy_report(a, u, eta, settings).map(|r| r.0)
}

pub fn solve_sdp_noisy_report(
    a: &Autocorrelation,
    u: &SupportSet,
    eta: f64,
    settings: &SdpSettings,
) -> Result<(LiftedMatrix, SolveReport)> {
    if eta == 0.0 {
        return solve_sdp_equality_report(a, u, settings);
    }
    settings.validate()?;
    check_inputs(a, u, eta)?;
    check_unreachable_lags(a, u, eta)?;
    splitting(a, u, eta, settings)
}

fn psd_projection(z: &DMatrix<C64>, shift: f64) -> DMatrix<C64> {
    let k = z.nrows();
    let mut m = z.clone();
    for i in 0..k {
        m[(i, i)] -= C64::new(shift, 0.0);
    }
    let eig = m.symmetric_eigen();
    let mut out = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.eigenvectors.column(idx);
            out += (v * v.adjoint()) * C64::new(lambda, 0.0);
        }
    }
    out
}

/// Projection onto `{ X : |sum_group(X) - target| <= radius }` per group.
fn box_projection(y: &mut DMatrix<C64>, groups: &LagGroups, targets: &[C64], radius: f64) {
    for (g, members) in groups.members.iter().enumerate() {
        let r = groups.sum(g, y) - targets[g];
        let norm = r.norm();
        if norm <= radius {
            continue;
        }
        let mut delta = r * ((norm - radius) / norm);
        if groups.lags[g] == 0 {
            delta.im = 0.0;
        }
        let share = delta / members.len() as f64;
        for &(p, q) in members {
            y[(p, q)] -= share;
            if p != q {
                y[(q, p)] = y[(p, q)].conj();
            }
        }
    }
}

/// Largest excess of a group sum over the radius, as a Euclidean norm over
/// groups.
fn violation(x: &DMatrix<C64>, groups: &LagGroups, targets: &[C64], radius: f64) -> f64 {
    (0..groups.lags.len())
        .map(|g| {
            let e = ((groups.sum(g, x) - targets[g]).norm() - radius).max(0.0);
            e * e
        })
        .sum::<f64>()
        .sqrt()
}

fn splitting(
    a: &Autocorrelation,
    u: &SupportSet,
    eta: f64,
    settings: &SdpSettings,
) -> Result<(LiftedMatrix, SolveReport)> {
    let k = u.len();
    let scale = a.energy();
    let groups = LagGroups::new(u);
    let targets: Vec<C64> = groups.lags.iter().map(|&d| a.lag(d) / scale).collect();
    let radius = eta / scale;
    // the trace is pinned by the lag-0 constraint in the equality program
    let gamma = if eta == 0.0 { 0.0 } else { settings.step };
    let relax = settings.relaxation;

    let mut z = DMatrix::from_diagonal_element(k, k, C64::new(1.0 / k as f64, 0.0));
    let mut last = f64::INFINITY;
    for it in 1..=settings.max_iter {
        let x = psd_projection(&z, gamma);
        let mut y = &x * C64::new(2.0, 0.0) - &z;
        box_projection(&mut y, &groups, &targets, radius);
        let gap = (&y - &x).norm();
        z += (y - &x) * C64::new(relax, 0.0);
        if it % 10 == 0 || it == settings.max_iter {
            last = violation(&x, &groups, &targets, radius).max(gap);
            if last <= settings.tol_feas {
                return finish(a, u, x * C64::new(scale, 0.0), it);
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: settings.max_iter,
        residual: last,
    })
}

fn finish(
    a: &Autocorrelation,
    u: &SupportSet,
    x: DMatrix<C64>,
    iterations: usize,
) -> Result<(LiftedMatrix, SolveReport)> {
    let lifted = LiftedMatrix::new(a.n(), u.to_vec(), x)?;
    let report = SolveReport {
        residual: lifted.constraint_residual(a)?,
        trace: lifted.trace(),
        iterations,
        method: SdpMethod::Splitting,
    };
    Ok((lifted, report))
}
