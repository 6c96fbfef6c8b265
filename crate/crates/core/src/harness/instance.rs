use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{SparseSignal, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportModel {
    /// Each index independently with probability `s / n`.
    Bernoulli(f64),
    /// Exactly `k` indices, uniformly without replacement.
    UniformK(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueDist {
    /// Independent standard normal real and imaginary parts.
    #[default]
    ComplexGaussian,
    RealGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub n: usize,
    pub model: SupportModel,
    pub values: ValueDist,
    pub seed: u64,
}

impl InstanceConfig {
    pub fn uniform(n: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            model: SupportModel::UniformK(k),
            values: ValueDist::ComplexGaussian,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        match self.model {
            SupportModel::Bernoulli(s) if !(s >= 1.0 && s <= self.n as f64) => Err(Error::InvalidInput(format!(
                "expected sparsity must lie in [1, {}], got {s}",
                self.n
            ))),
            SupportModel::UniformK(k) if k == 0 || k > self.n => Err(Error::InvalidInput(format!(
                "sparsity must lie in 1..={}, got {k}",
                self.n
            ))),
            _ => Ok(()),
        }
    }
}

/// Draws a random sparse signal; the same configuration always yields the
/// same signal.
pub fn gen_instance(cfg: &InstanceConfig) -> Result<SparseSignal> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let support: Vec<usize> = match cfg.model {
        SupportModel::UniformK(k) => {
            let mut v = sample(&mut rng, n, k).into_vec();
            v.sort_unstable();
            v
        }
        SupportModel::Bernoulli(s) => {
            let p = s / n as f64;
            loop {
                let v: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
                if !v.is_empty() {
                    break v;
                }
            }
        }
    };
    let entries = support
        .into_iter()
        .map(|i| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = match cfg.values {
                ValueDist::ComplexGaussian => StandardNormal.sample(&mut rng),
                ValueDist::RealGaussian => 0.0,
            };
            (i, C64::new(re, im))
        })
        .collect();
    SparseSignal::new(n, entries)
}
