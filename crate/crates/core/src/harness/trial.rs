use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ambiguity::equivalent;
use crate::error::{Error, Result};
use crate::measure::{autocorrelation, support_of};
use crate::noisy_support::{recover_support_noisy, threshold_support, NoisySupportParams};
use crate::recovery::{
    rank_one_approx, recover_on_support, relative_residual, solve_sdp_noisy, sparse_fienup, FienupParams, SdpSettings,
};
use crate::sets::SupportSet;
use crate::signal::{Autocorrelation, SparseSignal};
use crate::turnpike::{recover_support, TurnpikeParams};

use super::instance::{gen_instance, InstanceConfig, SupportModel, ValueDist};
use super::noise::{inject_noise, NoiseConfig, NoiseMode};

/// Relative orbit distance below which a recovery counts as correct.
pub const SUCCESS_TOL: f64 = 1e-3;
/// Relative autocorrelation residual a correct recovery must also meet.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "tspr")]
    Tspr,
    #[serde(rename = "tspr-noisy")]
    TsprNoisy,
    #[serde(rename = "fienup")]
    Fienup,
    #[serde(rename = "known-support-sdp")]
    KnownSupportSdp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Tspr,
        Algorithm::TsprNoisy,
        Algorithm::Fienup,
        Algorithm::KnownSupportSdp,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Tspr => "tspr",
            Algorithm::TsprNoisy => "tspr-noisy",
            Algorithm::Fienup => "fienup",
            Algorithm::KnownSupportSdp => "known-support-sdp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub alg: Algorithm,
    pub trials: usize,
    pub base_seed: u64,
    pub values: ValueDist,
    /// Noise budget for `tspr-noisy`.
    pub eta: f64,
    /// Deletion budget for `tspr-noisy`.
    pub c: usize,
    pub fienup_inits: usize,
    pub fienup_iters: usize,
    pub sdp: SdpSettings,
    /// Support stage of `tspr`.
    pub turnpike: TurnpikeParams,
    /// Run trials on the rayon pool.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            alg: Algorithm::Tspr,
            trials: 100,
            base_seed: 0,
            values: ValueDist::ComplexGaussian,
            eta: 1e-3,
            c: 2,
            fienup_inits: 100,
            fienup_iters: 500,
            sdp: SdpSettings::default(),
            turnpike: TurnpikeParams::default(),
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub k_realized: usize,
    pub alg: Algorithm,
    pub success: bool,
    /// Whether the support stage returned the true support (always true for
    /// algorithms that do not estimate a support).
    pub support_recovered: bool,
    /// Relative autocorrelation residual of the output, NaN if none.
    pub residual: f64,
    pub wall_ms: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` in cell `(n, k)`.
pub fn trial_seed(base_seed: u64, n: usize, k: usize, index: usize) -> u64 {
    let mut h = splitmix(base_seed);
    for v in [n as u64, k as u64, index as u64] {
        h = splitmix(h ^ v);
    }
    h
}

/// Derives an independent stream for one purpose within a trial.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    label.bytes().fold(splitmix(seed), |h, b| splitmix(h ^ b as u64))
}

fn is_success(x: &SparseSignal, y: &SparseSignal, a: &Autocorrelation) -> Result<(bool, f64)> {
    let residual = relative_residual(y, a)?;
    Ok((equivalent(x, y, SUCCESS_TOL)? && residual <= RESIDUAL_TOL, residual))
}

/// Threshold halfway between the largest noise sample and the smallest
/// nonzero clean lag.
pub fn mid_gap_tau(clean: &Autocorrelation, noisy: &Autocorrelation) -> Result<f64> {
    let w = support_of(clean, 0.0)?;
    let floor = clean
        .values()
        .iter()
        .zip(noisy.values())
        .map(|(c, d)| (c - d).norm())
        .fold(0.0, f64::max);
    let top = w.iter().map(|&i| clean.lag(i).norm()).fold(f64::INFINITY, f64::min);
    Ok(0.5 * (floor + top))
}

/// Runs one seeded trial. Algorithmic failures count as unsuccessful trials;
/// only invalid configurations are errors.
pub fn run_trial(cfg: &BenchConfig, n: usize, k: usize, index: usize) -> Result<TrialResult> {
    let seed = trial_seed(cfg.base_seed, n, k, index);
    let x = gen_instance(&InstanceConfig {
        n,
        model: SupportModel::UniformK(k),
        values: cfg.values,
        seed,
    })?;
    let a = autocorrelation(&x);
    let truth = SupportSet::canonical(x.support())?;
    let start = Instant::now();

    let (success, support_recovered, residual) = match cfg.alg {
        Algorithm::Tspr => {
            let w = support_of(&a, 0.0)?;
            match recover_support(&w, &cfg.turnpike) {
                Ok(u) => {
                    let found = u == truth;
                    match recover_on_support(&a, &u, &cfg.sdp) {
                        Ok(y) => {
                            let (ok, r) = is_success(&x, &y, &a)?;
                            (ok, found, r)
                        }
                        Err(_) => (false, found, f64::NAN),
                    }
                }
                Err(_) => (false, false, f64::NAN),
            }
        }
        Algorithm::KnownSupportSdp => match recover_on_support(&a, &truth, &cfg.sdp) {
            Ok(y) => {
                let (ok, r) = is_success(&x, &y, &a)?;
                (ok, true, r)
            }
            Err(_) => (false, true, f64::NAN),
        },
        Algorithm::Fienup => {
            let params = FienupParams {
                k,
                inits: cfg.fienup_inits,
                iters: cfg.fienup_iters,
                seed: sub_seed(seed, Algorithm::Fienup.tag()),
            };
            let out = sparse_fienup(&a, &params)?;
            let (ok, r) = is_success(&x, &out.signal, &a)?;
            (ok, true, r)
        }
        Algorithm::TsprNoisy => {
            let noise = NoiseConfig {
                eta: cfg.eta,
                mode: NoiseMode::GaussianScaled,
            };
            let noisy = inject_noise(&a, &noise, sub_seed(seed, "noise"))?.a;
            let tau = mid_gap_tau(&a, &noisy)?;
            let params = NoisySupportParams {
                tau,
                c: cfg.c,
                pair_quota: None,
            };
            let support = threshold_support(&noisy, tau).and_then(|wd| recover_support_noisy(&wd, &params));
            match support {
                Ok(u) => {
                    let found = u == truth;
                    match solve_sdp_noisy(&noisy, &u, cfg.eta, &cfg.sdp) {
                        Ok(lifted) => {
                            let bound = 4.0 * k as f64 * cfg.eta;
                            let ok = lifted.lift_error(&x).is_some_and(|e| e <= bound);
                            let r = rank_one_approx(&lifted)
                                .and_then(|y| relative_residual(&y, &noisy))
                                .unwrap_or(f64::NAN);
                            (ok, found, r)
                        }
                        Err(_) => (false, found, f64::NAN),
                    }
                }
                Err(_) => (false, false, f64::NAN),
            }
        }
    };

    Ok(TrialResult {
        seed,
        n,
        k,
        k_realized: x.sparsity(),
        alg: cfg.alg,
        success,
        support_recovered,
        residual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_tags_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.tag().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("gespar".parse::<Algorithm>().is_err());
    }

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let s = trial_seed(1, 64, 5, 0);
        assert_eq!(s, trial_seed(1, 64, 5, 0));
        for other in [
            trial_seed(2, 64, 5, 0),
            trial_seed(1, 65, 5, 0),
            trial_seed(1, 64, 6, 0),
            trial_seed(1, 64, 5, 1),
        ] {
            assert_ne!(s, other);
        }
        assert_ne!(sub_seed(s, "fienup"), sub_seed(s, "noise"));
    }

    #[test]
    fn k_one_trials_succeed() {
        for alg in [Algorithm::Tspr, Algorithm::KnownSupportSdp, Algorithm::Fienup] {
            let cfg = BenchConfig {
                alg,
                fienup_inits: 2,
                fienup_iters: 10,
                ..Default::default()
            };
            for i in 0..5 {
                let r = run_trial(&cfg, 32, 1, i).unwrap();
                assert!(r.success, "{alg} trial {i}: {r:?}");
            }
        }
    }
}
