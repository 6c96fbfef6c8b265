use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::trial::{run_trial, BenchConfig, TrialResult};

/// Aggregate of one `(n, k)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    /// Mean relative residual over trials that produced an output.
    pub mean_residual: f64,
    /// Mean wall time per trial; `None` when timing is not reported.
    pub mean_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
    /// Every trial, ordered by cell and then by trial index.
    pub results: Vec<TrialResult>,
}

fn validate_grid(grid: &[(usize, usize)], trials: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid has no cells".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    for &(n, k) in grid {
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!("cell (n={n}, k={k}) needs 1 <= k <= n")));
        }
    }
    Ok(())
}

/// Aggregates trial results per cell, in grid order.
pub fn aggregate(grid: &[(usize, usize)], results: &[TrialResult]) -> Vec<CurveRow> {
    let mut cells: BTreeMap<(usize, usize), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        cells.entry((r.n, r.k)).or_default().push(r);
    }
    grid.iter()
        .map(|&(n, k)| {
            let rs = cells.get(&(n, k)).map(Vec::as_slice).unwrap_or(&[]);
            let trials = rs.len();
            let successes = rs.iter().filter(|r| r.success).count();
            let finite: Vec<f64> = rs.iter().map(|r| r.residual).filter(|v| v.is_finite()).collect();
            let mean_residual = if finite.is_empty() {
                f64::NAN
            } else {
                finite.iter().sum::<f64>() / finite.len() as f64
            };
            let mean_ms = rs.iter().map(|r| r.wall_ms).sum::<f64>() / trials.max(1) as f64;
            CurveRow {
                n,
                k,
                trials,
                successes,
                rate: if trials > 0 {
                    successes as f64 / trials as f64
                } else {
                    0.0
                },
                mean_residual,
                mean_ms: Some(mean_ms),
            }
        })
        .collect()
}

/// Runs `cfg.trials` seeded trials in every cell. Trials are independent and
/// the output does not depend on the order in which they complete.
pub fn run_curve(grid: &[(usize, usize)], cfg: &BenchConfig) -> Result<CurveTable> {
    validate_grid(grid, cfg.trials)?;
    let tasks: Vec<(usize, usize, usize)> = grid
        .iter()
        .flat_map(|&(n, k)| (0..cfg.trials).map(move |i| (n, k, i)))
        .collect();
    let results: Vec<TrialResult> = if cfg.parallel {
        tasks
            .par_iter()
            .map(|&(n, k, i)| run_trial(cfg, n, k, i))
            .collect::<Result<_>>()?
    } else {
        tasks
            .iter()
            .map(|&(n, k, i)| run_trial(cfg, n, k, i))
            .collect::<Result<_>>()?
    };
    Ok(CurveTable {
        rows: aggregate(grid, &results),
        results,
    })
}

/// [`run_curve`] on a dedicated pool of `threads` workers (`0` uses the
/// global pool).
pub fn run_curve_in_pool(grid: &[(usize, usize)], cfg: &BenchConfig, threads: usize) -> Result<CurveTable> {
    if threads == 0 || !cfg.parallel {
        return run_curve(grid, cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_curve(grid, cfg))
}

/// Sparsity at which the success rate crosses one half.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPoint {
    /// Interpolated crossing.
    pub k50: f64,
    /// Every cell evaluated during the search, ascending in `k`.
    pub cells: Vec<CurveRow>,
}

/// Bisection over `k` in `[lo, hi]` for the first cell whose success rate
/// drops below 0.5, assuming the rate is nonincreasing in `k`. The crossing
/// is interpolated linearly between that cell and its predecessor.
pub fn half_point(n: usize, lo: usize, hi: usize, cfg: &BenchConfig) -> Result<HalfPoint> {
    if lo == 0 || lo >= hi || hi > n {
        return Err(Error::InvalidInput(format!("bad bracket [{lo}, {hi}] for n={n}")));
    }
    let mut cache: BTreeMap<usize, CurveRow> = BTreeMap::new();
    let rate = |k: usize, cache: &mut BTreeMap<usize, CurveRow>| -> Result<f64> {
        if let Some(r) = cache.get(&k) {
            return Ok(r.rate);
        }
        let row = run_curve(&[(n, k)], cfg)?.rows.remove(0);
        let r = row.rate;
        cache.insert(k, row);
        Ok(r)
    };
    if rate(lo, &mut cache)? < 0.5 {
        return Err(Error::InvalidInput(format!(
            "success rate at k={lo} is already below 0.5"
        )));
    }
    if rate(hi, &mut cache)? >= 0.5 {
        return Err(Error::InvalidInput(format!(
            "success rate at k={hi} is still at least 0.5"
        )));
    }
    // invariant: rate(good) >= 0.5 > rate(bad)
    let (mut good, mut bad) = (lo, hi);
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if rate(mid, &mut cache)? >= 0.5 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let (rg, rb) = (cache[&good].rate, cache[&bad].rate);
    let k50 = good as f64 + (rg - 0.5) / (rg - rb);
    Ok(HalfPoint {
        k50,
        cells: cache.into_values().collect(),
    })
}
