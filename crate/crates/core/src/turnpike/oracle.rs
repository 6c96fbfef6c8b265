//! Exhaustive turnpike search used as ground truth for the combinatorial
//! algorithm.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::measure::distance_set;
use crate::sets::{DistanceSet, SupportSet};

use super::estimate_sparsity;

pub const DEFAULT_ORACLE_CAP: usize = 14;

/// Every canonical set whose distance set is exactly `w`.
///
/// Placing `0` and `max(W)` fixes the frame, so every point of a solution is
/// itself an element of `W`. The search repeatedly takes the largest distance
/// not yet realised by the partial set and branches over every pair
/// `(p, p + d)` of candidate points that could realise it. Without
/// multiplicities the realising pair need not touch an endpoint, so all
/// placements are tried. Partial sets are pruned as soon as a pairwise
/// distance falls outside `W`.
pub fn brute_force_turnpike(w: &DistanceSet, cap: usize) -> Result<Vec<SupportSet>> {
    let k_est = estimate_sparsity(w.len());
    if k_est > cap {
        return Err(Error::OracleTooLarge { k_est, cap });
    }
    let Some(top) = w.max() else {
        return Err(Error::EmptyMeasurement);
    };
    if w[0] != 0 {
        return Ok(Vec::new());
    }
    if top == 0 {
        return Ok(vec![SupportSet::new(vec![0])?]);
    }

    let mut search = Search {
        w,
        found: BTreeSet::new(),
        seen: BTreeSet::new(),
    };
    let mut start = BTreeSet::new();
    start.insert(0);
    start.insert(top);
    search.explore(start);

    search
        .found
        .into_iter()
        .map(SupportSet::new)
        .collect::<Result<Vec<_>>>()
}

struct Search<'a> {
    w: &'a DistanceSet,
    found: BTreeSet<Vec<usize>>,
    seen: BTreeSet<Vec<usize>>,
}

impl Search<'_> {
    fn explore(&mut self, points: BTreeSet<usize>) {
        let key: Vec<usize> = points.iter().copied().collect();
        if !self.seen.insert(key.clone()) {
            return;
        }
        let realised = distance_set(&key);
        let Some(&d) = self.w.iter().rev().find(|&&d| !realised.contains(d)) else {
            // all of W explained and (by pruning) nothing outside W produced
            let canon = SupportSet::canonical(key).expect("nonempty");
            self.found.insert(canon.into_vec());
            return;
        };
        for &p in self.w.iter() {
            let q = p + d;
            if q > *self.w.last().unwrap() {
                break;
            }
            if !self.w.contains(q) {
                continue;
            }
            let mut next = points.clone();
            let mut ok = true;
            for x in [p, q] {
                if next.contains(&x) {
                    continue;
                }
                if next.iter().any(|&y| !self.w.contains(x.abs_diff(y))) {
                    ok = false;
                    break;
                }
                next.insert(x);
            }
            if ok {
                self.explore(next);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_is_found() {
        let w = DistanceSet::new(vec![0, 3, 8, 11, 13, 18, 26, 29, 31, 39, 42]).unwrap();
        let sols = brute_force_turnpike(&w, DEFAULT_ORACLE_CAP).unwrap();
        assert!(sols.iter().any(|s| s.as_slice() == [0, 3, 11, 29, 42]));
        for s in &sols {
            assert_eq!(distance_set(s), w);
        }
    }

    #[test]
    fn two_points() {
        let w = DistanceSet::new(vec![0, 6]).unwrap();
        let sols = brute_force_turnpike(&w, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(sols, vec![SupportSet::new(vec![0, 6]).unwrap()]);
    }

    #[test]
    fn homometric_pair() {
        // {0,1,4,10,12,17} and {0,1,8,11,13,17} share a distance multiset
        let a = distance_set(&[0, 1, 4, 10, 12, 17]);
        let b = distance_set(&[0, 1, 8, 11, 13, 17]);
        assert_eq!(a, b);
        let sols = brute_force_turnpike(&a, DEFAULT_ORACLE_CAP).unwrap();
        let want_a = SupportSet::canonical([0, 1, 4, 10, 12, 17]).unwrap();
        let want_b = SupportSet::canonical([0, 1, 8, 11, 13, 17]).unwrap();
        assert!(sols.contains(&want_a) && sols.contains(&want_b));
    }

    #[test]
    fn cap_guard() {
        let w = distance_set(&(0..20).map(|i| i * i).collect::<Vec<_>>());
        assert!(matches!(
            brute_force_turnpike(&w, 5),
            Err(Error::OracleTooLarge { cap: 5, .. })
        ));
    }
}
