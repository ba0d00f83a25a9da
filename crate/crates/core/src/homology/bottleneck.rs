//! Exact bottleneck distance between persistence diagrams.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{PersistenceDiagram, PersistencePair};

/// Bottleneck distance in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bottleneck {
    /// `+∞` when the essential classes cannot be matched.
    pub distance: f64,
    /// Set when the diagrams differ in their number of infinite-death pairs.
    pub essential_mismatch: bool,
}

/// Bottleneck distance between the `dim` parts of two diagrams.
///
/// Infinite-death pairs are matched among themselves by birth; the finite
/// parts are matched exactly by a binary search over the finite set of
/// candidate costs with a bipartite feasibility test.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram, dim: usize) -> Bottleneck {
    let (fin1, ess1) = split(d1, dim);
    let (fin2, ess2) = split(d2, dim);
    if ess1.len() != ess2.len() {
        return Bottleneck { distance: f64::INFINITY, essential_mismatch: true };
    }
    let essential = ess1.iter().zip(&ess2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Bottleneck {
        distance: essential.max(finite_bottleneck(&fin1, &fin2)),
        essential_mismatch: false,
    }
}

fn split(d: &PersistenceDiagram, dim: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut essential = Vec::new();
    for p in d.in_dim(dim) {
        if p.is_essential() {
            essential.push(p.birth);
        } else if p.death > p.birth {
            finite.push((p.birth, p.death));
        }
    }
    essential.sort_by(f64::total_cmp);
    (finite, essential)
}

#[inline]
fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[inline]
fn half_pers(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Bottleneck distance between finite point sets, diagonal included.
pub(crate) fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    candidates.extend(a.iter().map(|&p| half_pers(p)));
    candidates.extend(b.iter().map(|&p| half_pers(p)));
    for &p in a {
        candidates.extend(b.iter().map(|&q| linf(p, q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest half-persistence always admits the all-diagonal matching.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let upper = a.iter().chain(b).map(|&p| half_pers(p)).fold(0.0, f64::max);
    hi = hi.min(candidates.partition_point(|&c| c < upper));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Whether a perfect matching of `A ∪ diag(B)` with `B ∪ diag(A)` exists
/// using only edges of cost at most `delta`.
fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], delta: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    let size = na + nb;
    // Left: a_0..a_{na-1}, then diagonal copies of b. Right: b_0..b_{nb-1},
    // then diagonal copies of a.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); size];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            if linf(p, q) <= delta {
                adj[i].push(j as u32);
            }
        }
        if half_pers(p) <= delta {
            adj[i].push((nb + i) as u32);
        }
    }
    for (j, &q) in b.iter().enumerate() {
        let row = &mut adj[na + j];
        if half_pers(q) <= delta {
            row.push(j as u32);
        }
        row.extend((0..na).map(|i| (nb + i) as u32));
    }
    hopcroft_karp(&adj, size) == size
}

/// Maximum bipartite matching size for a square graph given by left
/// adjacency lists.
fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> usize {
    const NONE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NONE; n_left];
    let mut match_r = vec![NONE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut matched = 0;
    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v as usize];
                if w == NONE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }
        let mut next = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == NONE && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next) {
                matched += 1;
            }
        }
    }
}

/// Iterative DFS along the BFS layers.
fn augment(
    root: usize,
    adj: &[Vec<u32>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    const NONE: usize = usize::MAX;
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][next[u]] as usize;
        next[u] += 1;
        let w = match_r[v];
        if w == NONE {
            // Flip the path recorded on the stack.
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = match_l[u];
                match_l[u] = v;
                match_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

impl From<(f64, f64)> for PersistencePair {
    fn from((birth, death): (f64, f64)) -> Self {
        PersistencePair { dim: 0, birth, death }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dgm(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(points.iter().map(|&p| p.into()).collect(), 0, f64::INFINITY)
    }

    #[test]
    fn identical_and_single_point() {
        let a = dgm(&[(0.0, 1.0), (0.2, 0.9), (0.0, f64::INFINITY)]);
        assert_eq!(bottleneck_distance(&a, &a, 0).distance, 0.0);
        let b = dgm(&[(0.0, 1.0)]);
        let e = dgm(&[]);
        assert_eq!(bottleneck_distance(&b, &e, 0).distance, 0.5);
    }

    #[test]
    fn essential_mismatch_is_flagged() {
        let a = dgm(&[(0.0, f64::INFINITY)]);
        let b = dgm(&[(0.0, 1.0)]);
        let r = bottleneck_distance(&a, &b, 0);
        assert!(r.essential_mismatch);
        assert_eq!(r.distance, f64::INFINITY);
        let c = dgm(&[(0.25, f64::INFINITY)]);
        assert_eq!(bottleneck_distance(&a, &c, 0).distance, 0.25);
    }

    #[test]
    fn prefers_diagonal_when_cheaper() {
        // Matching the points costs 2, sending both to the diagonal costs 0.5.
        let a = dgm(&[(0.0, 1.0)]);
        let b = dgm(&[(2.0, 3.0)]);
        assert_eq!(bottleneck_distance(&a, &b, 0).distance, 0.5);
        let c = dgm(&[(0.1, 1.2)]);
        assert_eq!(bottleneck_distance(&a, &c, 0).distance, finite_bottleneck(&[(0.0, 1.0)], &[(0.1, 1.2)]));
        assert!((bottleneck_distance(&a, &c, 0).distance - 0.2).abs() < 1e-15);
    }

    #[test]
    fn other_dimensions_are_ignored() {
        let mut a = dgm(&[(0.0, 1.0)]);
        a.pairs[0].dim = 1;
        assert_eq!(bottleneck_distance(&a, &dgm(&[]), 0).distance, 0.0);
        assert_eq!(bottleneck_distance(&a, &dgm(&[]), 1).distance, 0.5);
    }
}
