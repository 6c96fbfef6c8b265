//! Sparse error-reduction baseline: alternate between the measured Fourier
//! magnitude and a `k`-sparse projection onto the first `n` samples, from
//! several random starts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal::{Autocorrelation, SparseSignal, C64};

use super::pipeline::relative_residual;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FienupParams {
    pub k: usize,
    pub inits: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for FienupParams {
    fn default() -> Self {
        Self {
            k: 1,
            inits: 100,
            iters: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FienupResult {
    pub signal: SparseSignal,
    /// Relative autocorrelation residual of `signal`.
    pub residual: f64,
    /// Index of the start that produced `signal`.
    pub best_init: usize,
}

/// Keeps the `k` largest entries of `buf[..n]` and zeroes everything else.
fn sparsify(buf: &mut [C64], n: usize, k: usize) {
    let mut idx: Vec<usize> = (0..n).collect();
    if k < n {
        idx.select_nth_unstable_by(k, |&i, &j| buf[j].norm_sqr().total_cmp(&buf[i].norm_sqr()));
        let mut keep = vec![false; n];
        for &i in &idx[..k] {
            keep[i] = true;
        }
        for (i, v) in buf[..n].iter_mut().enumerate() {
            if !keep[i] {
                *v = C64::new(0.0, 0.0);
            }
        }
    }
    for v in &mut buf[n..] {
        *v = C64::new(0.0, 0.0);
    }
}

pub fn sparse_fienup(a: &Autocorrelation, params: &FienupParams) -> Result<FienupResult> {
    let n = a.n();
    let FienupParams { k, inits, iters, seed } = *params;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("sparsity must lie in 1..={n}, got {k}")));
    }
    if inits == 0 {
        return Err(Error::InvalidInput("need at least one initialization".into()));
    }
    let m = 2 * n;
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    // |DFT_2n(x)|^2 is the DFT of the conjugated two-sided autocorrelation
    let mut spectrum: Vec<C64> = a.two_sided().iter().map(|v| v.conj()).collect();
    forward.process(&mut spectrum);
    let target: Vec<f64> = spectrum.iter().map(|v| v.re.max(0.0).sqrt()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<FienupResult> = None;
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for init in 0..inits {
        for v in buf.iter_mut().take(n) {
            *v = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        }
        sparsify(&mut buf, n, k);
        for _ in 0..iters {
            forward.process(&mut buf);
            for (v, &mag) in buf.iter_mut().zip(&target) {
                let norm = v.norm();
                *v = if norm > 0.0 {
                    *v * (mag / norm)
                } else {
                    C64::new(mag, 0.0)
                };
            }
            inverse.process(&mut buf);
            let inv = 1.0 / m as f64;
            for v in buf.iter_mut() {
                *v *= inv;
            }
            sparsify(&mut buf, n, k);
        }
        let signal = SparseSignal::from_dense(&buf[..n])?;
        let residual = relative_residual(&signal, a)?;
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(FienupResult {
                signal,
                residual,
                best_init: init,
            });
        }
        if best.as_ref().unwrap().residual <= 1e-12 {
            break;
        }
    }
    Ok(best.expect("at least one init"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::equivalent;
    use crate::measure::autocorrelation;

    #[test]
    fn single_spike_is_exact() {
        let x = SparseSignal::new(16, vec![(5, C64::new(1.5, -0.5))]).unwrap();
        let a = autocorrelation(&x);
        let r = sparse_fienup(
            &a,
            &FienupParams {
                k: 1,
                inits: 1,
                iters: 20,
                seed: 3,
            },
        )
        .unwrap();
        assert!(equivalent(&x, &r.signal, 1e-9).unwrap());
    }

    #[test]
    fn best_init_beats_every_single_init() {
        let x = SparseSignal::new(
            32,
            vec![
                (0, C64::new(1.0, 0.0)),
                (3, C64::new(-0.5, 0.8)),
                (10, C64::new(0.3, 0.2)),
                (20, C64::new(1.2, -0.1)),
            ],
        )
        .unwrap();
        let a = autocorrelation(&x);
        let p = FienupParams {
            k: 4,
            inits: 6,
            iters: 30,
            seed: 11,
        };
        let all = sparse_fienup(&a, &p).unwrap();
        let single = sparse_fienup(&a, &FienupParams { inits: 1, ..p }).unwrap();
        assert!(all.residual <= single.residual);
    }

    #[test]
    fn recovers_small_complex_signal() {
        let x = SparseSignal::new(
            24,
            vec![
                (1, C64::new(1.0, 0.5)),
                (4, C64::new(-0.3, 1.1)),
                (13, C64::new(0.8, -0.6)),
            ],
        )
        .unwrap();
        let r = sparse_fienup(
            &autocorrelation(&x),
            &FienupParams {
                k: 3,
                inits: 50,
                iters: 300,
                seed: 5,
            },
        )
        .unwrap();
        assert!(r.residual < 1e-6, "residual {}", r.residual);
    }

    #[test]
    fn rejects_bad_params() {
        let a = Autocorrelation::new(vec![C64::new(1.0, 0.0); 4]).unwrap();
        assert!(sparse_fienup(
            &a,
            &FienupParams {
                k: 0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(sparse_fienup(
            &a,
            &FienupParams {
                k: 1,
                inits: 0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
