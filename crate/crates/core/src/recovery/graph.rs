//! The collision graph `H(U)` and the exact recovery path built on it.
//!
//! An edge joins two support points whose distance is realised by no other
//! pair, so the corresponding lifted entry is read directly off the
//! autocorrelation. A triangle fixes one magnitude, `|x_j|^2 = |X_ij||X_jk| / |X_ik|`,
//! and propagation along edges (`x_p = X_pq / conj(x_q)`) fixes the rest.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sets::{DistanceSet, SupportSet};
use crate::signal::{Autocorrelation, C64};

use super::lifted::LiftedMatrix;

/// `H(U)`: vertices are support indices `0..k`, edges join pairs with a
/// unique distance that is present in `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    positions: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SupportGraph {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Edges as index pairs `(i, j)`, `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }

    /// Edge test by support values.
    pub fn has_edge_between(&self, a: usize, b: usize) -> bool {
        match (self.positions.binary_search(&a), self.positions.binary_search(&b)) {
            (Ok(i), Ok(j)) => self.has_edge(i, j),
            _ => false,
        }
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn is_connected(&self) -> bool {
        let k = self.positions.len();
        if k == 0 {
            return true;
        }
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == k
    }

    /// All triangles `(i, j, l)` with `i < j < l`.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &(i, j) in &self.edges {
            for &l in &self.adjacency[j] {
                if l > j && self.has_edge(i, l) {
                    out.push((i, j, l));
                }
            }
        }
        out
    }
}

pub fn collision_graph(u: &SupportSet, w: &DistanceSet) -> SupportGraph {
    let k = u.len();
    let mut freq: HashMap<usize, u32> = HashMap::new();
    for p in 0..k {
        for q in p + 1..k {
            *freq.entry(u[q] - u[p]).or_default() += 1;
        }
    }
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); k];
    for p in 0..k {
        for q in p + 1..k {
            let d = u[q] - u[p];
            if freq[&d] == 1 && w.contains(d) {
                edges.push((p, q));
                adjacency[p].push(q);
                adjacency[q].push(p);
            }
        }
    }
    SupportGraph {
        positions: u.to_vec(),
        edges,
        adjacency,
    }
}

/// Lifted entries readable from the autocorrelation: `X_{u_i u_j} = a_{u_j - u_i}`
/// on every edge of `g`. The diagonal and all other entries stay unknown
/// (zero, with the mask cleared).
pub fn entries_from_edges(u: &SupportSet, a: &Autocorrelation, g: &SupportGraph) -> Result<LiftedMatrix> {
    if g.positions() != u.as_slice() {
        return Err(Error::InvalidInput("graph was built for a different support".into()));
    }
    if u.span() >= a.n() {
        return Err(Error::Dimension(format!(
            "support span {} does not fit in {} lags",
            u.span(),
            a.n()
        )));
    }
    let k = u.len();
    let mut m = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    let mut known = DMatrix::from_element(k, k, false);
    for &(i, j) in g.edges() {
        m[(i, j)] = a.lag(u[j] - u[i]);
        known[(i, j)] = true;
        known[(j, i)] = true;
    }
    Ok(LiftedMatrix::new(a.n(), u.to_vec(), m)?.with_known(known))
}

/// Whether the exact path can run: `H(U)` connected with at least one
/// triangle (or `k <= 2`).
pub fn direct_applicable(g: &SupportGraph) -> bool {
    let k = g.positions().len();
    k <= 2 || (g.is_connected() && !g.triangles().is_empty())
}

/// Exact rank-one reconstruction from the entries on `H(U)`.
///
/// Returns `None` when the graph does not support it. The caller verifies
/// the result against all lag constraints.
pub fn direct_solve(u: &SupportSet, a: &Autocorrelation, w: &DistanceSet) -> Result<Option<LiftedMatrix>> {
    let k = u.len();
    let a0 = a.energy();
    match k {
        0 => return Err(Error::InvalidInput("empty support".into())),
        1 => {
            let m = DMatrix::from_element(1, 1, C64::new(a0, 0.0));
            return Ok(Some(LiftedMatrix::new(a.n(), u.to_vec(), m)?));
        }
        2 => {
            // |x_0|^2 + |x_1|^2 = a_0 and |x_0|^2 |x_1|^2 = |a_d|^2; the two
            // root assignments are conjugate-flips of each other.
            let ad = a.lag(u[1]);
            let disc = (a0 * a0 - 4.0 * ad.norm_sqr()).max(0.0).sqrt();
            let (r0, r1) = ((a0 + disc) / 2.0, (a0 - disc) / 2.0);
            let m = DMatrix::from_row_slice(2, 2, &[C64::new(r0, 0.0), ad, ad.conj(), C64::new(r1, 0.0)]);
            return Ok(Some(LiftedMatrix::new(a.n(), u.to_vec(), m)?));
        }
        _ => {}
    }

    let g = collision_graph(u, w);
    if !g.is_connected() {
        return Ok(None);
    }
    let known = entries_from_edges(u, a, &g)?;
    let x_mat = known.matrix();
    // best-conditioned triangle: largest smallest edge magnitude
    let Some((i, j, l)) = g.triangles().into_iter().max_by(|&(i, j, l), &(p, q, r)| {
        let m1 = x_mat[(i, j)].norm().min(x_mat[(j, l)].norm()).min(x_mat[(i, l)].norm());
        let m2 = x_mat[(p, q)].norm().min(x_mat[(q, r)].norm()).min(x_mat[(p, r)].norm());
        m1.total_cmp(&m2)
    }) else {
        return Ok(None);
    };
    let denom = x_mat[(i, l)].norm();
    if denom == 0.0 {
        return Ok(None);
    }
    let mag_sq = x_mat[(i, j)].norm() * x_mat[(j, l)].norm() / denom;

    let mut x: Vec<Option<C64>> = vec![None; k];
    x[j] = Some(C64::new(mag_sq.sqrt(), 0.0));
    let mut queue = VecDeque::from([j]);
    while let Some(q) = queue.pop_front() {
        let xq = x[q].unwrap();
        for &p in g.neighbors(q) {
            if x[p].is_none() {
                if xq.norm() == 0.0 {
                    return Ok(None);
                }
                // X_pq = x_p conj(x_q)
                x[p] = Some(x_mat[(p, q)] / xq.conj());
                queue.push_back(p);
            }
        }
    }
    let x: Vec<C64> = x.into_iter().map(|v| v.unwrap()).collect();
    let m = DMatrix::from_fn(k, k, |p, q| x[p] * x[q].conj());
    let mut mask = known.known_mask().clone();
    for p in 0..k {
        mask[(p, p)] = true;
    }
    Ok(Some(LiftedMatrix::new(a.n(), u.to_vec(), m)?.with_known(mask)))
}
