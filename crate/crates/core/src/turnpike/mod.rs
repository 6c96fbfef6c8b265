//! Support recovery from a pairwise distance set without multiplicities.
//!
//! The combinatorial algorithm recovers the canonical support `U` (with
//! `u_0 = 0` and first gap no larger than the last gap) from `W`:
//!
//! 1. `u_01` is the difference of the two largest distances;
//! 2. an Intersection Step `Z = {0} ∪ (W ∩ (W + u_01))` keeps every `u_0j`;
//! 3. a Graph Step on `G(Z, W)` identifies `u_00, ..., u_0t` as the smallest
//!    vertices connected to `max(W)` by a distance that is unique in `Z`;
//! 4. a multiple Intersection Step with `u_01, ..., u_0t` yields the rest.
//!
//! The method is probabilistic. With verification enabled every output is
//! checked against `W` and mismatches are reported as errors. An automatic
//! width is widened step by step until the check passes. [`refine_support`]
//! is an opt-in fallback that iterates the intersection and graph filters to
//! a fixpoint; it succeeds on much denser sets than the steps above.

mod oracle;

use std::collections::{BTreeSet, HashMap};

pub use oracle::{brute_force_turnpike, DEFAULT_ORACLE_CAP};

use crate::error::{Error, Result};
use crate::measure::distance_set;
use crate::sets::{DistanceSet, SupportSet};

/// Width of the Graph Step (number of leading support points it must find,
/// minus one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphWidth {
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurnpikeParams {
    pub t: GraphWidth,
    /// Require `distance_set(U) == W` before returning.
    pub verify: bool,
    /// When the steps above fail, fall back to [`refine_support`].
    pub refine: bool,
}

impl Default for TurnpikeParams {
    fn default() -> Self {
        Self {
            t: GraphWidth::Auto,
            verify: true,
            refine: false,
        }
    }
}

/// Sparsity implied by `|W|` when no distance collides: `|W| = k(k-1)/2 + 1`.
pub fn estimate_sparsity(num_distances: usize) -> usize {
    if num_distances == 0 {
        return 0;
    }
    let disc = (8.0 * num_distances as f64 - 7.0).sqrt();
    ((1.0 + disc) / 2.0 - 1e-9).ceil() as usize
}

/// `max(1, ceil(cbrt(ln max(k, 3))))`, clamped to `[1, k - 2]`.
pub fn auto_width(k_est: usize) -> usize {
    let t = (k_est.max(3) as f64).ln().cbrt().ceil() as usize;
    t.max(1).min(k_est.saturating_sub(2).max(1))
}

impl TurnpikeParams {
    pub fn width_for(&self, k_est: usize) -> usize {
        match self.t {
            GraphWidth::Auto => auto_width(k_est),
            GraphWidth::Fixed(t) => t.max(1),
        }
    }
}

/// `w_{K-1} - w_{K-2}`.
pub fn infer_u01(w: &DistanceSet) -> Result<usize> {
    let k = w.len();
    if k < 2 {
        return Err(Error::TooFewDistances(k));
    }
    Ok(w[k - 1] - w[k - 2])
}

/// `W ∩ ⋂_d (W + d)` by sorted merges.
pub fn intersect(w: &DistanceSet, shifts: &[usize]) -> DistanceSet {
    let mut current: Vec<usize> = w.to_vec();
    for &d in shifts {
        let mut next = Vec::with_capacity(current.len());
        let mut j = 0;
        for &x in &current {
            // is x - d in W?
            let Some(target) = x.checked_sub(d) else {
                continue;
            };
            while j < w.len() && w[j] < target {
                j += 1;
            }
            if j < w.len() && w[j] == target {
                next.push(x);
            }
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    DistanceSet::new(current).expect("merge preserves order")
}

/// `G(Z, W)`: an edge joins two vertices when their difference is realised
/// by no other pair of `Z` and belongs to `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionGraph {
    vertices: Vec<usize>,
    /// Pairs of vertex values, smaller first.
    edges: Vec<(usize, usize)>,
}

impl CollisionGraph {
    pub fn build(z: &[usize], w: &DistanceSet) -> Self {
        let mut freq: HashMap<usize, u32> = HashMap::with_capacity(z.len() * z.len() / 2);
        for (p, &a) in z.iter().enumerate() {
            for &b in &z[p + 1..] {
                *freq.entry(b - a).or_default() += 1;
            }
        }
        let mut edges = Vec::new();
        for (p, &a) in z.iter().enumerate() {
            for &b in &z[p + 1..] {
                let d = b - a;
                if freq[&d] == 1 && w.contains(d) {
                    edges.push((a, b));
                }
            }
        }
        Self {
            vertices: z.to_vec(),
            edges,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.contains(&key)
    }

    /// Neighbours of vertex `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Every vertex of `G(Z, W)` adjacent to `max(W)`, ascending.
fn top_neighbours(z: &DistanceSet, w: &DistanceSet) -> Result<Vec<usize>> {
    let top = w
        .max()
        .ok_or_else(|| Error::InvalidInput("empty distance set".into()))?;
    if !z.contains(top) || !z.contains(0) {
        return Err(Error::InvalidInput(
            "graph step needs both 0 and max(W) in the candidate set".into(),
        ));
    }
    // Only the star around max(W) is needed; uniqueness is still tested
    // against all pairs of Z.
    let mut freq: HashMap<usize, u32> = HashMap::with_capacity(z.len() * z.len() / 2);
    for (p, &a) in z.iter().enumerate() {
        for &b in &z[p + 1..] {
            *freq.entry(b - a).or_default() += 1;
        }
    }
    Ok(z.iter()
        .copied()
        .filter(|&v| v != top)
        .filter(|&v| {
            let d = top - v;
            freq[&d] == 1 && w.contains(d)
        })
        .collect())
}

fn take_leading(neighbours: &[usize], t: usize) -> Result<Vec<usize>> {
    if neighbours.len() < t + 1 {
        return Err(Error::GraphStepDeficient {
            found: neighbours.len(),
            needed: t + 1,
        });
    }
    Ok(neighbours[..=t].to_vec())
}

/// The smallest `t + 1` vertices of `G(Z, W)` adjacent to `max(W)`.
pub fn graph_step(z: &DistanceSet, w: &DistanceSet, t: usize) -> Result<Vec<usize>> {
    take_leading(&top_neighbours(z, w)?, t)
}

fn verify(u: &SupportSet, w: &DistanceSet) -> Result<()> {
    let got = distance_set(u);
    if got != *w {
        let missing = w.difference(&got).len();
        let extra = got.difference(w).len();
        return Err(Error::VerificationFailed(format!(
            "candidate support of size {} leaves {missing} distances unexplained and produces {extra} spurious ones",
            u.len()
        )));
    }
    Ok(())
}

/// Recovers the canonical support whose distance set is `w`.
///
/// With an automatic width and verification on, a failed check is retried
/// with `t + 1, t + 2, ...` up to `k_est - 2`; the first verified candidate
/// wins. A fixed width gets a single attempt.
pub fn recover_support(w: &DistanceSet, params: &TurnpikeParams) -> Result<SupportSet> {
    if w.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    if w[0] != 0 {
        return Err(Error::InvalidInput(
            "distance set of a nonzero signal must contain 0".into(),
        ));
    }
    let k_est = estimate_sparsity(w.len());
    if k_est <= 2 {
        return SupportSet::new(w.to_vec());
    }

    let u01 = infer_u01(w)?;
    let z = DistanceSet::from_unsorted(std::iter::once(0).chain(intersect(w, &[u01]).iter().copied()));

    // A single intersection already isolates the support for sparse enough
    // sets; accept it only if it explains W exactly.
    if distance_set(&z) == *w {
        return SupportSet::canonical(z.iter().copied());
    }

    let attempt = graph_path(w, &z, k_est, params);
    match attempt {
        Err(e) if params.refine => refine_support(w).map_err(|_| e),
        other => other,
    }
}

fn graph_path(w: &DistanceSet, z: &DistanceSet, k_est: usize, params: &TurnpikeParams) -> Result<SupportSet> {
    let neighbours = top_neighbours(z, w)?;
    let t0 = params.width_for(k_est);
    let t_max = match params.t {
        GraphWidth::Auto if params.verify => t0.max(k_est - 2),
        _ => t0,
    };
    let mut last = None;
    for t in t0..=t_max {
        let leading = match take_leading(&neighbours, t) {
            Ok(l) => l,
            Err(e) => {
                last = Some(last.unwrap_or(e));
                break;
            }
        };
        let tail = intersect(w, &leading[1..=t]);
        let u = SupportSet::canonical(leading[..t].iter().chain(tail.iter()).copied())?;
        if !params.verify {
            return Ok(u);
        }
        match verify(&u, w) {
            Ok(()) => return Ok(u),
            Err(e) => last = Some(last.unwrap_or(e)),
        }
    }
    Err(last.expect("at least one width tried"))
}

/// Fixpoint of two sound filters, started from `W` with `0`, `u_01` and
/// `max(W)` known to be support points:
///
/// - a candidate `z` survives only if `|z - s| ∈ W` for every known `s`;
/// - both ends of every edge of `G(candidates, W)` become known.
///
/// Neither filter can drop a true support point, so the result is accepted
/// when the survivors explain `W` exactly.
pub fn refine_support(w: &DistanceSet) -> Result<SupportSet> {
    let top = w
        .max()
        .ok_or_else(|| Error::InvalidInput("empty distance set".into()))?;
    let u01 = infer_u01(w)?;
    let mut known: BTreeSet<usize> = [0, u01, top].into_iter().collect();
    let mut applied: BTreeSet<usize> = BTreeSet::new();
    let mut cand: Vec<usize> = w.to_vec();
    loop {
        for &s in &known {
            if applied.insert(s) {
                cand.retain(|&z| w.contains(z.abs_diff(s)));
            }
        }
        let before = known.len();
        for (a, b) in CollisionGraph::build(&cand, w).edges() {
            known.insert(*a);
            known.insert(*b);
        }
        if known.len() == before {
            break;
        }
    }
    let u = SupportSet::canonical(cand)?;
    verify(&u, w)?;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_w() -> DistanceSet {
        DistanceSet::new(vec![0, 3, 8, 11, 13, 18, 26, 29, 31, 39, 42]).unwrap()
    }

    #[test]
    fn worked_example_steps() {
        let w = worked_w();
        assert_eq!(infer_u01(&w).unwrap(), 3);
        assert_eq!(intersect(&w, &[3]).as_slice(), &[3, 11, 29, 42]);
        let u = recover_support(&w, &TurnpikeParams::default()).unwrap();
        assert_eq!(u.as_slice(), &[0, 3, 11, 29, 42]);
    }

    #[test]
    fn worked_example_graph() {
        let w = worked_w();
        let z = DistanceSet::new(vec![0, 3, 8, 11, 29, 42]).unwrap();
        let g = CollisionGraph::build(&z, &w);
        assert!(g.has_edge(11, 42));
        assert!(!g.has_edge(3, 8));
        // every edge of G(Z, W) joins two support points
        let u = [0, 3, 11, 29, 42];
        for &(a, b) in g.edges() {
            assert!(u.contains(&a) && u.contains(&b), "edge ({a}, {b})");
        }
        let lead = graph_step(&z, &w, 2).unwrap();
        assert_eq!(lead, vec![0, 3, 11]);
    }

    #[test]
    fn tiny_sets() {
        let w = DistanceSet::new(vec![0, 9]).unwrap();
        assert_eq!(infer_u01(&w).unwrap(), 9);
        assert_eq!(intersect(&w, &[9]).as_slice(), &[9]);
        assert_eq!(graph_step(&w, &w, 0).unwrap(), vec![0]);
        let p = TurnpikeParams::default();
        assert_eq!(recover_support(&w, &p).unwrap().as_slice(), &[0, 9]);
        let w0 = DistanceSet::new(vec![0]).unwrap();
        assert_eq!(recover_support(&w0, &p).unwrap().as_slice(), &[0]);
        assert_eq!(infer_u01(&w0), Err(Error::TooFewDistances(1)));
    }

    #[test]
    fn graph_step_deficiency_is_reported() {
        let w = worked_w();
        let z = DistanceSet::new(vec![0, 3, 8, 11, 29, 42]).unwrap();
        assert!(matches!(
            graph_step(&z, &w, 10),
            Err(Error::GraphStepDeficient { needed: 11, .. })
        ));
        let no_top = DistanceSet::new(vec![0, 3]).unwrap();
        assert!(graph_step(&no_top, &w, 1).is_err());
    }

    #[test]
    fn sparsity_estimate_and_width() {
        assert_eq!(estimate_sparsity(1), 1);
        assert_eq!(estimate_sparsity(2), 2);
        assert_eq!(estimate_sparsity(11), 5);
        assert_eq!(estimate_sparsity(12), 6);
        assert_eq!(estimate_sparsity(16), 6);
        assert_eq!(auto_width(3), 1);
        assert_eq!(auto_width(5), 2);
        assert_eq!(auto_width(20), 2);
        assert_eq!(auto_width(1000), 2);
    }

    #[test]
    fn unverified_mode_returns_candidate() {
        // W of {0, 1, 2, 4, 7}: a dense set where a single intersection
        // does not isolate the support
        let v = [0usize, 1, 2, 4, 7];
        let w = distance_set(&v);
        let p = TurnpikeParams {
            t: GraphWidth::Fixed(1),
            verify: false,
            refine: false,
        };
        // whatever comes back, it is canonical and built from W
        if let Ok(u) = recover_support(&w, &p) {
            assert_eq!(u[0], 0);
            assert!(u.iter().all(|&x| w.contains(x)));
        }
    }

    fn dense_instance(n: usize, k: usize, seed: u64) -> (SupportSet, DistanceSet) {
        use rand::{seq::index::sample, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = SupportSet::canonical(sample(&mut rng, n, k).into_vec()).unwrap();
        let w = distance_set(&u);
        (u, w)
    }

    #[test]
    fn refinement_agrees_on_worked_example() {
        assert_eq!(refine_support(&worked_w()).unwrap().as_slice(), &[0, 3, 11, 29, 42]);
    }

    #[test]
    fn refinement_only_runs_when_asked() {
        let mut rescued = 0;
        for seed in 0..40 {
            let (u, w) = dense_instance(1024, 24, seed);
            let plain = recover_support(&w, &TurnpikeParams::default());
            let with = recover_support(
                &w,
                &TurnpikeParams {
                    refine: true,
                    ..Default::default()
                },
            );
            match (plain, with) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(_), Ok(b)) => {
                    assert_eq!(distance_set(&b), w);
                    rescued += usize::from(b == u);
                }
                (Ok(_), Err(e)) => panic!("refinement lost a solution: {e}"),
                (Err(_), Err(_)) => {}
            }
        }
        assert!(rescued > 0);
    }

    #[test]
    fn fixed_width_gets_one_attempt() {
        // with t = 1 the single shift rarely isolates a dense support, while
        // the automatic width is allowed to grow
        let mut fixed_ok = 0;
        let mut auto_ok = 0;
        for seed in 0..30 {
            let (u, w) = dense_instance(4096, 20, 100 + seed);
            let fixed = TurnpikeParams {
                t: GraphWidth::Fixed(1),
                ..Default::default()
            };
            fixed_ok += usize::from(recover_support(&w, &fixed).is_ok_and(|v| v == u));
            auto_ok += usize::from(recover_support(&w, &TurnpikeParams::default()).is_ok_and(|v| v == u));
        }
        assert!(auto_ok > fixed_ok, "auto {auto_ok} fixed {fixed_ok}");
    }

    #[test]
    fn rejects_sets_without_zero() {
        let w = DistanceSet::new(vec![3, 5]).unwrap();
        assert!(recover_support(&w, &TurnpikeParams::default()).is_err());
    }
}
