use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of nonnegative integers.
///
/// Used for autocorrelation supports (pairwise distance sets), intersections
/// of shifted copies of them, and other lag sets. Multiplicity is never kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DistanceSet(Vec<usize>);

impl DistanceSet {
    /// Validates that `elements` is strictly increasing.
    pub fn new(elements: Vec<usize>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("distance set must be strictly increasing".into()));
        }
        Ok(Self(elements))
    }

    pub fn from_unsorted<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &DistanceSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    pub fn union(&self, other: &DistanceSet) -> DistanceSet {
        Self::from_unsorted(self.0.iter().chain(&other.0).copied())
    }

    pub fn difference(&self, other: &DistanceSet) -> DistanceSet {
        Self(self.0.iter().copied().filter(|&x| !other.contains(x)).collect())
    }
}

impl Deref for DistanceSet {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl FromIterator<usize> for DistanceSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_unsorted(iter)
    }
}

/// A signal support in canonical position: `u_0 = 0`, and for three or
/// more elements the first gap is no larger than the last gap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Validates an already canonical support.
    pub fn new(elements: Vec<usize>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("support must be nonempty".into()));
        }
        if elements[0] != 0 {
            return Err(Error::InvalidInput("support must start at 0".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("support must be strictly increasing".into()));
        }
        let k = elements.len();
        if k >= 3 && elements[1] - elements[0] > elements[k - 1] - elements[k - 2] {
            return Err(Error::InvalidInput(
                "support is not in canonical orientation (first gap exceeds last gap)".into(),
            ));
        }
        Ok(Self(elements))
    }

    /// Shifts (and, if needed, mirrors) an arbitrary nonempty integer set into
    /// canonical position.
    pub fn canonical<I: IntoIterator<Item = usize>>(items: I) -> Result<Self> {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let Some(&first) = v.first() else {
            return Err(Error::InvalidInput("support must be nonempty".into()));
        };
        for x in &mut v {
            *x -= first;
        }
        let k = v.len();
        if k >= 3 {
            let m = v[k - 1];
            let mirrored: Vec<usize> = v.iter().rev().map(|&x| m - x).collect();
            let (first_gap, last_gap) = (v[1], m - v[k - 2]);
            // equal gaps: both orientations qualify, take the smaller one
            if first_gap > last_gap || (first_gap == last_gap && mirrored < v) {
                v = mirrored;
            }
        }
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn span(&self) -> usize {
        *self.0.last().unwrap()
    }
}

impl Deref for SupportSet {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}
