//! Trivial ambiguities: time-shift, conjugate-flip and global phase.
//!
//! All three leave the autocorrelation unchanged, so recovery is only ever
//! defined up to them. [`canonicalize`] picks one representative per orbit;
//! [`equivalent`] is the success predicate used throughout the tests and the
//! harness.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::signal::{SparseSignal, C64};

fn rounded(v: f64, tol: f64) -> f64 {
    if tol > 0.0 {
        (v / tol).round()
    } else {
        v
    }
}

fn cmp_f64_seq(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Rotates the global phase so that the largest-magnitude entry is real and
/// positive. Entries within a relative `tol` of the maximum count as ties and
/// the earliest one is used.
fn fix_phase(x: &SparseSignal, tol: f64) -> SparseSignal {
    let max = x.entries().iter().map(|e| e.1.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return x.clone();
    }
    let (at, pivot) = *x.entries().iter().find(|e| e.1.norm() >= max * (1.0 - tol)).unwrap();
    if pivot.im == 0.0 && pivot.re > 0.0 {
        return x.clone();
    }
    // pin the pivot exactly so a second pass is a no-op
    let rot = pivot.conj() / pivot.norm();
    let entries = x
        .entries()
        .iter()
        .map(|&(i, v)| (i, if i == at { C64::new(pivot.norm(), 0.0) } else { v * rot }))
        .collect();
    SparseSignal::new(x.n(), entries).expect("rotation keeps the support")
}

/// Canonical orbit representative.
///
/// The signal is shifted to start at index 0; of it and its shifted
/// conjugate-flip, the one with the lexicographically smaller support wins,
/// ties broken by the magnitude sequence (rounded to `tol`) and then by the
/// phase-normalised values. Finally the global phase is rotated so that the
/// largest entry (earliest on ties) is real positive.
pub fn canonicalize(x: &SparseSignal, tol: f64) -> SparseSignal {
    if x.sparsity() == 0 {
        return x.clone();
    }
    let direct = fix_phase(&x.shifted_to_origin(), tol);
    let flipped = fix_phase(&x.conj_flip().shifted_to_origin(), tol);

    let order = direct
        .support()
        .cmp(&flipped.support())
        .then_with(|| {
            let ma: Vec<f64> = direct.values().iter().map(|v| rounded(v.norm(), tol)).collect();
            let mb: Vec<f64> = flipped.values().iter().map(|v| rounded(v.norm(), tol)).collect();
            cmp_f64_seq(&ma, &mb)
        })
        .then_with(|| {
            let flat = |s: &SparseSignal| -> Vec<f64> {
                s.values()
                    .iter()
                    .flat_map(|v| [rounded(v.re, tol), rounded(v.im, tol)])
                    .collect()
            };
            cmp_f64_seq(&flat(&direct), &flat(&flipped))
        });
    if order == Ordering::Greater {
        flipped
    } else {
        direct
    }
}

/// Smallest distance between `y` and the orbit of `x` reachable with shifts
/// to the origin, conjugate-flip and an optimally chosen global phase.
pub fn orbit_distance(x: &SparseSignal, y: &SparseSignal) -> Result<f64> {
    if x.n() != y.n() {
        return Err(Error::Dimension(format!(
            "signal lengths differ: {} vs {}",
            x.n(),
            y.n()
        )));
    }
    let target = y.shifted_to_origin();
    let candidates = [x.shifted_to_origin(), x.conj_flip().shifted_to_origin()];
    Ok(candidates
        .iter()
        .map(|c| phase_aligned_distance(c, &target))
        .fold(f64::INFINITY, f64::min))
}

/// `min_phi || a - e^{i phi} b ||`.
fn phase_aligned_distance(a: &SparseSignal, b: &SparseSignal) -> f64 {
    let mut inner = C64::new(0.0, 0.0);
    for &(i, va) in a.entries() {
        inner += va * b.get(i).conj();
    }
    // ||a - e^{i phi} b|| is minimised by the phase of <a, b>; evaluate it
    // entrywise rather than through |a|^2 + |b|^2 - 2|<a, b>|, which cancels
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut d2 = 0.0;
    for &(i, va) in a.entries() {
        d2 += (va - phase * b.get(i)).norm_sqr();
    }
    for &(i, vb) in b.entries() {
        if a.get(i) == C64::new(0.0, 0.0) {
            d2 += vb.norm_sqr();
        }
    }
    d2.sqrt()
}

/// `true` when `y` lies within relative distance `tol` of the orbit of `x`.
///
/// The comparison aligns supports exactly as [`canonicalize`] does and then
/// uses the optimal global phase, so it never depends on how near-ties in
/// magnitude are broken.
pub fn equivalent(x: &SparseSignal, y: &SparseSignal, tol: f64) -> Result<bool> {
    let d = orbit_distance(x, y)?;
    Ok(d <= tol * x.norm())
}

/// A support is aperiodic unless it has at most two elements or all of its
/// consecutive gaps are equal.
pub fn is_aperiodic_support(v: &[usize]) -> bool {
    if v.len() <= 2 {
        return false;
    }
    let gap = v[1] - v[0];
    v.windows(2).any(|w| w[1] - w[0] != gap)
}
