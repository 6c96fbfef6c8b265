//! Support recovery from a thresholded, noise-corrupted autocorrelation.
//!
//! Thresholding inserts spurious lags and deletes weak ones, which breaks the
//! two fragile steps of the noiseless algorithm (reading `u_01` off the two
//! largest distances, and the Graph Step). Instead an anchor distance
//! `u_{i0 j0}` between two points near one end of the support is found from
//! the distance set of the distance set, and the support is rebuilt from a
//! sequence of generalized Intersection Steps:
//!
//! * the largest `c + 2` elements of `W ∩ (W + u_{i0 j0})` give distances
//!   from `u_{i0}` to `c + 2` points `q_0 < ... < q_{c+1}` at the far end;
//! * the union over all `C(c+2, 2)` anchor differences of
//!   `(W ∩ (W + u_{q_i q_j})) + u_{q_j q_{c+1}}` contains the distances from
//!   the leading support points to `q_{c+1}`, giving a prefix of the support;
//! * the union over the differences of the first `c + 2` prefix points of
//!   `(W ∩ (W + u_{ij})) + u_{0i}` contains the remaining support points.
//!
//! Every candidate set is cleaned with the deletion budget `c`: a true support
//! point misses at most `c` of its distances to the other points, so
//! candidates that miss more are discarded (worst offender first). Points that
//! miss a distance and explain no lag uniquely are dropped as redundant.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::measure::distance_set;
use crate::sets::{DistanceSet, SupportSet};
use crate::signal::Autocorrelation;
use crate::turnpike::{estimate_sparsity, intersect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySupportParams {
    /// Magnitude threshold defining `W†`.
    pub tau: f64,
    /// Deletion budget: how many distances of one support point may be lost.
    pub c: usize,
    /// Minimum number of pairs sharing a difference; `None` means
    /// `max(1, ceil(sqrt(|W†|) / 4))`.
    pub pair_quota: Option<usize>,
}

impl Default for NoisySupportParams {
    fn default() -> Self {
        Self {
            tau: 0.0,
            c: 2,
            pair_quota: None,
        }
    }
}

impl NoisySupportParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidInput(format!("tau must be >= 0, got {}", self.tau)));
        }
        if self.c < 1 {
            return Err(Error::InvalidInput("c must be at least 1".into()));
        }
        if self.pair_quota == Some(0) {
            return Err(Error::InvalidInput("pair quota must be at least 1".into()));
        }
        Ok(())
    }

    pub fn quota_for(&self, num_lags: usize) -> usize {
        self.pair_quota.unwrap_or_else(|| default_quota(num_lags))
    }
}

/// `max(1, ceil(sqrt(K) / 4))`.
pub fn default_quota(num_lags: usize) -> usize {
    ((num_lags as f64).sqrt() / 4.0).ceil().max(1.0) as usize
}

/// `{ i : |a_i| >= tau }`.
pub fn threshold_support(a: &Autocorrelation, tau: f64) -> Result<DistanceSet> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidInput(format!("tau must be >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return crate::measure::support_of(a, 0.0);
    }
    let keep: Vec<usize> = (0..a.n()).filter(|&i| a.lag(i).norm() >= tau).collect();
    if keep.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    Ok(DistanceSet::new(keep).expect("increasing"))
}

/// Robust noise-scale threshold `3 * median(|a_i|) / 0.6745`.
pub fn auto_tau(a: &Autocorrelation) -> f64 {
    let mut mags: Vec<f64> = a.values().iter().map(|v| v.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let m = mags.len();
    let median = if m % 2 == 1 {
        mags[m / 2]
    } else {
        0.5 * (mags[m / 2 - 1] + mags[m / 2])
    };
    3.0 * median / 0.6745
}

/// Pairs `(w_i, w_j)`, `w_i < w_j`, drawn from a lag set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// Pairs whose difference lies in `wd` and is shared by at least `quota`
/// pairs of `wd`.
pub fn build_tsub(wd: &DistanceSet, quota: usize) -> PairSet {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for (p, &a) in wd.iter().enumerate() {
        for &b in &wd[p + 1..] {
            *count.entry(b - a).or_default() += 1;
        }
    }
    let mut pairs = Vec::new();
    for (p, &a) in wd.iter().enumerate() {
        for &b in &wd[p + 1..] {
            let d = b - a;
            if wd.contains(d) && count[&d] >= quota {
                pairs.push((a, b));
            }
        }
    }
    PairSet { pairs }
}

/// The anchor distance `w_max - w_min`, where `w_min` is the largest first
/// coordinate in `T†_sub` and `w_max` its largest partner.
pub fn infer_uij_noisy(wd: &DistanceSet, quota: usize) -> Result<usize> {
    anchor_from_pairs(&build_tsub(wd, quota))
}

fn anchor_from_pairs(tsub: &PairSet) -> Result<usize> {
    let w_min = tsub.pairs().iter().map(|p| p.0).max().ok_or(Error::NoAnchorPair)?;
    let w_max = tsub
        .pairs()
        .iter()
        .filter(|p| p.0 == w_min)
        .map(|p| p.1)
        .max()
        .expect("w_min has a partner");
    Ok(w_max - w_min)
}

fn misses(x: usize, set: &BTreeSet<usize>, wd: &DistanceSet) -> usize {
    set.iter().filter(|&&y| y != x && !wd.contains(x.abs_diff(y))).count()
}

/// Removes points that miss more than `c` of their distances, worst first.
fn enforce_deletion_budget(mut set: BTreeSet<usize>, wd: &DistanceSet, c: usize, keep: &[usize]) -> BTreeSet<usize> {
    loop {
        let worst = set
            .iter()
            .copied()
            .filter(|x| !keep.contains(x))
            .map(|x| (misses(x, &set, wd), x))
            .filter(|&(m, _)| m > c)
            .max();
        match worst {
            Some((_, x)) => {
                set.remove(&x);
            }
            None => return set,
        }
    }
}

/// Drops points that miss at least one distance and whose distances inside
/// `wd` are all realised by other pairs as well.
fn drop_redundant(mut set: BTreeSet<usize>, wd: &DistanceSet, keep: &[usize]) -> BTreeSet<usize> {
    loop {
        let mut count: HashMap<usize, usize> = HashMap::new();
        let pts: Vec<usize> = set.iter().copied().collect();
        for (p, &a) in pts.iter().enumerate() {
            for &b in &pts[p + 1..] {
                *count.entry(b - a).or_default() += 1;
            }
        }
        let victim = pts
            .iter()
            .copied()
            .filter(|x| !keep.contains(x))
            .filter_map(|x| {
                let m = misses(x, &set, wd);
                let redundant = pts
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| x.abs_diff(y))
                    .filter(|&d| wd.contains(d))
                    .all(|d| count[&d] >= 2);
                (m > 0 && redundant).then_some((m, x))
            })
            .max();
        match victim {
            Some((_, x)) => {
                set.remove(&x);
            }
            None => return set,
        }
    }
}

/// Recovers the canonical support from a thresholded lag set `wd`.
pub fn recover_support_noisy(wd: &DistanceSet, params: &NoisySupportParams) -> Result<SupportSet> {
    params.validate()?;
    if wd.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    let c = params.c;
    if estimate_sparsity(wd.len()) <= 2 {
        return SupportSet::canonical(wd.iter().copied());
    }
    let top = wd.max().unwrap();
    let quota = params.quota_for(wd.len());

    // (ii) anchor distance
    let anchor = infer_uij_noisy(wd, quota)?;

    // (iii) distances from u_{i0} to the c + 2 outermost points
    let first = intersect(wd, &[anchor]);
    if first.len() < c + 2 {
        return Err(Error::SupportIncomplete {
            stage: "anchor intersection",
            found: first.len(),
            needed: c + 2,
        });
    }
    let outer = &first[first.len() - (c + 2)..];
    let last = outer[c + 1];

    // (iv) distances from the leading points to q_{c+1}
    let mut to_last = BTreeSet::new();
    for i in 0..c + 2 {
        for j in i + 1..c + 2 {
            let shift = last - outer[j];
            for &v in intersect(wd, &[outer[j] - outer[i]]).iter() {
                let x = v + shift;
                if x <= top {
                    to_last.insert(x);
                }
            }
        }
    }
    let reference = *to_last.last().ok_or(Error::SupportIncomplete {
        stage: "prefix intersections",
        found: 0,
        needed: c + 2,
    })?;
    let positions: BTreeSet<usize> = to_last.iter().map(|&x| reference - x).collect();
    let positions = enforce_deletion_budget(positions, wd, c, &[0]);
    let prefix_len = quota.max(c + 2);
    let prefix: Vec<usize> = positions.iter().copied().take(prefix_len).collect();
    if prefix.len() < c + 2 {
        return Err(Error::SupportIncomplete {
            stage: "prefix",
            found: prefix.len(),
            needed: c + 2,
        });
    }

    // (v) the remaining points, beyond the prefix
    let prefix_end = *prefix.last().unwrap();
    let mut support: BTreeSet<usize> = prefix.iter().copied().collect();
    for i in 0..c + 2 {
        for j in i + 1..c + 2 {
            for &v in intersect(wd, &[prefix[j] - prefix[i]]).iter() {
                let x = v + prefix[i];
                if x > prefix_end && x <= top {
                    support.insert(x);
                }
            }
        }
    }
    let support = enforce_deletion_budget(support, wd, c, &[0]);
    let span = *support.last().unwrap();
    let support = drop_redundant(support, wd, &[0, span]);

    let u = SupportSet::canonical(support.iter().copied())?;
    check_consistency(&u, wd, c)?;
    Ok(u)
}

/// Final acceptance test under the deletion/insertion model: the span of the
/// support must be a measured lag, no point may miss more than `c` distances,
/// and at most `c` measured lags may be left unexplained.
fn check_consistency(u: &SupportSet, wd: &DistanceSet, c: usize) -> Result<()> {
    if !wd.contains(u.span()) {
        return Err(Error::VerificationFailed(format!(
            "support span {} is not a measured lag",
            u.span()
        )));
    }
    let set: BTreeSet<usize> = u.iter().copied().collect();
    if let Some(&x) = u.iter().find(|&&x| misses(x, &set, wd) > c) {
        return Err(Error::VerificationFailed(format!(
            "support point {x} misses more than {c} of its distances"
        )));
    }
    let unexplained = wd.difference(&distance_set(u)).len();
    if unexplained > c {
        return Err(Error::VerificationFailed(format!(
            "{unexplained} measured lags are not explained by the support"
        )));
    }
    Ok(())
}
