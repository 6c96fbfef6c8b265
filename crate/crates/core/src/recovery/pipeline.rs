use crate::ambiguity::canonicalize;
use crate::error::{Error, Result};
use crate::measure::{autocorrelation, support_of};
use crate::noisy_support::{recover_support_noisy, threshold_support, NoisySupportParams};
use crate::sets::SupportSet;
use crate::signal::{Autocorrelation, SparseSignal};
use crate::turnpike::{recover_support, TurnpikeParams};

use super::lifted::LiftedMatrix;
use super::rank_one::rank_one_approx;
use super::sdp::{solve_sdp_equality, solve_sdp_noisy, SdpSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsprOptions {
    pub turnpike: TurnpikeParams,
    pub sdp: SdpSettings,
    /// Largest accepted `||autocorrelation(x) - a|| / ||a||`.
    pub residual_tol: f64,
}

impl Default for TsprOptions {
    fn default() -> Self {
        Self {
            turnpike: TurnpikeParams::default(),
            sdp: SdpSettings::default(),
            residual_tol: 1e-6,
        }
    }
}

/// Relative autocorrelation residual `||autocorrelation(x) - a|| / ||a||`.
pub fn relative_residual(x: &SparseSignal, a: &Autocorrelation) -> Result<f64> {
    let norm = a.norm();
    let d = autocorrelation(x).distance(a)?;
    Ok(if norm > 0.0 { d / norm } else { d })
}

/// Values on a known support: solve the lifted program and take the best
/// rank-one factor.
pub fn recover_on_support(a: &Autocorrelation, u: &SupportSet, settings: &SdpSettings) -> Result<SparseSignal> {
    let x = solve_sdp_equality(a, u, settings)?;
    rank_one_approx(&x)
}

/// Noiseless two-stage recovery: support from the distance set, values from
/// the lifted program, checked against the measurement.
pub fn tspr(a: &Autocorrelation, opts: &TsprOptions) -> Result<SparseSignal> {
    let w = support_of(a, 0.0)?;
    let u = recover_support(&w, &opts.turnpike)?;
    let x = recover_on_support(a, &u, &opts.sdp)?;
    let r = relative_residual(&x, a)?;
    if r > opts.residual_tol {
        return Err(Error::RecoveryFailed(r));
    }
    Ok(canonicalize(&x, 1e-9))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyOptions {
    pub support: NoisySupportParams,
    /// Per-lag noise budget of the lifted program.
    pub eta: f64,
    pub sdp: SdpSettings,
}

impl Default for NoisyOptions {
    fn default() -> Self {
        Self {
            support: NoisySupportParams::default(),
            eta: 0.0,
            sdp: SdpSettings::default(),
        }
    }
}

/// Noise-robust recovery. Returns the signal and the lifted estimate, on
/// which the error guarantee is stated.
pub fn tspr_noisy(a: &Autocorrelation, opts: &NoisyOptions) -> Result<(SparseSignal, LiftedMatrix)> {
    if !(opts.eta >= 0.0) {
        return Err(Error::InvalidInput(format!("eta must be >= 0, got {}", opts.eta)));
    }
    let wd = threshold_support(a, opts.support.tau)?;
    let u = recover_support_noisy(&wd, &opts.support)?;
    let lifted = solve_sdp_noisy(a, &u, opts.eta, &opts.sdp)?;
    let x = rank_one_approx(&lifted)?;
    Ok((x, lifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::equivalent;
    use crate::signal::C64;

    #[test]
    fn single_entry_is_exact() {
        let x = SparseSignal::new(16, vec![(9, C64::new(-0.4, 1.2))]).unwrap();
        let y = tspr(&autocorrelation(&x), &TsprOptions::default()).unwrap();
        assert!(equivalent(&x, &y, 1e-12).unwrap());
    }

    #[test]
    fn worked_support() {
        let vals = [0.8, -1.3, 0.4, 2.1, -0.6].map(|v| C64::new(v, 0.2 * v + 0.1));
        let x = SparseSignal::from_parts(64, &[2, 5, 13, 31, 44], &vals).unwrap();
        let a = autocorrelation(&x);
        let y = tspr(&a, &TsprOptions::default()).unwrap();
        assert!(equivalent(&x, &y, 1e-6).unwrap());

        let opts = NoisyOptions {
            support: NoisySupportParams {
                tau: 1e-9,
                ..Default::default()
            },
            ..Default::default()
        };
        let (z, lifted) = tspr_noisy(&a, &opts).unwrap();
        assert!(equivalent(&y, &z, 1e-6).unwrap());
        assert!(lifted.lift_error(&x).unwrap() < 1e-6);
    }
}
