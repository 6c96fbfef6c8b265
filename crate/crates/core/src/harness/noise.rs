use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::support_of;
use crate::noisy_support::threshold_support;
use crate::sets::DistanceSet;
use crate::signal::{Autocorrelation, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Complex Gaussian noise (real at lag 0) rescaled to `||z||_2 = eta`.
    GaussianScaled,
    /// Gaussian noise plus forced edits: each lag in `insert` is set to
    /// magnitude `2 tau`, each lag in `delete` to magnitude `tau / 2`, both
    /// with a random phase.
    Explicit {
        tau: f64,
        insert: Vec<usize>,
        delete: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub eta: f64,
    pub mode: NoiseMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyMeasurement {
    pub a: Autocorrelation,
    /// `W† \ W` at the explicit threshold (empty in Gaussian mode).
    pub w_ins: DistanceSet,
    /// `W \ W†` at the explicit threshold (empty in Gaussian mode).
    pub w_del: DistanceSet,
}

fn unit_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

pub fn inject_noise(a: &Autocorrelation, cfg: &NoiseConfig, seed: u64) -> Result<NoisyMeasurement> {
    if !(cfg.eta >= 0.0) {
        return Err(Error::InvalidInput(format!("eta must be >= 0, got {}", cfg.eta)));
    }
    let n = a.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = a.values().to_vec();
    if cfg.eta > 0.0 {
        let mut z: Vec<C64> = (0..n)
            .map(|i| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if i == 0 { 0.0 } else { StandardNormal.sample(&mut rng) };
                C64::new(re, im)
            })
            .collect();
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut z {
            *v *= cfg.eta / norm;
        }
        for (v, dz) in values.iter_mut().zip(&z) {
            *v += dz;
        }
    }

    let NoiseMode::Explicit { tau, insert, delete } = &cfg.mode else {
        return Ok(NoisyMeasurement {
            a: Autocorrelation::new(values)?,
            w_ins: DistanceSet::default(),
            w_del: DistanceSet::default(),
        });
    };
    if !(*tau > 0.0) {
        return Err(Error::InvalidInput(format!("explicit mode needs tau > 0, got {tau}")));
    }
    for &lag in insert.iter().chain(delete) {
        if lag == 0 || lag >= n {
            return Err(Error::InvalidInput(format!(
                "cannot edit lag {lag} (must lie in 1..{n})"
            )));
        }
    }
    for &lag in insert {
        values[lag] = unit_phase(&mut rng) * (2.0 * tau);
    }
    for &lag in delete {
        values[lag] = unit_phase(&mut rng) * (0.5 * tau);
    }
    let noisy = Autocorrelation::new(values)?;
    let w = support_of(a, 0.0)?;
    let wd = threshold_support(&noisy, *tau)?;
    Ok(NoisyMeasurement {
        w_ins: wd.difference(&w),
        w_del: w.difference(&wd),
        a: noisy,
    })
}
