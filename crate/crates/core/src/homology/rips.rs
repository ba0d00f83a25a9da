//! Vietoris-Rips persistent homology over Z/2.
//!
//! Persistent cohomology is computed with implicit coboundary columns in the
//! combinatorial number system, in the style of Ripser:
//!
//! * simplices are identified by `Σ_k C(v_k, k+1)` over their vertices
//!   `v_dim > … > v_0`, and never materialised as boundary matrices;
//! * dimension 0 is handled by a union-find pass over sorted edges;
//! * columns paired as deaths in dimension `d − 1` are cleared before
//!   dimension `d` is reduced;
//! * a column whose smallest cofacet has the same diameter and is not yet a
//!   pivot is paired immediately (an emergent zero-persistence pair).
//!
//! The filtration orders simplices by diameter, ties by decreasing index.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{DistanceMatrix, HomologyError, PersistenceDiagram, PersistencePair};

/// Upper bound on the number of columns reduced in one dimension.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 60_000_000;

/// Persistence diagram of the Rips filtration of `d` in dimensions
/// `0..=max_dim`, truncated at `max_edge` (default: the enclosing radius).
///
/// Zero-persistence pairs are dropped.
pub fn rips_persistence(
    d: &DistanceMatrix,
    max_dim: usize,
    max_edge: Option<f64>,
) -> Result<PersistenceDiagram, HomologyError> {
    rips_persistence_with_budget(d, max_dim, max_edge, DEFAULT_SIMPLEX_BUDGET)
}

/// As [`rips_persistence`] with an explicit column budget per dimension.
pub fn rips_persistence_with_budget(
    d: &DistanceMatrix,
    max_dim: usize,
    max_edge: Option<f64>,
    budget: usize,
) -> Result<PersistenceDiagram, HomologyError> {
    if max_dim > 2 {
        return Err(HomologyError::UnsupportedDimension(max_dim));
    }
    if d.n() == 0 {
        return Err(HomologyError::InvalidArgument("Rips persistence needs at least one point".into()));
    }
    let threshold = match max_edge {
        Some(t) if !(t > 0.0) || t.is_nan() => {
            return Err(HomologyError::InvalidArgument(format!("max_edge must be positive, got {t}")));
        }
        Some(t) => t,
        None => d.enclosing_radius(),
    };
    let rips = Rips::new(d, threshold, max_dim)?;
    let mut pairs = Vec::new();
    let mut columns = rips.dim0_pairs(&mut pairs, budget)?;
    for dim in 1..=max_dim {
        let pivots = rips.reduce(&columns, dim, &mut pairs);
        if dim < max_dim {
            columns = rips.assemble_columns(dim + 1, &pivots, budget)?;
        }
    }
    Ok(PersistenceDiagram::new(pairs, max_dim, threshold))
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    diam: f64,
    index: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Max-heap order: the greatest entry is the earliest in the filtration
/// (smallest diameter, then largest index).
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.diam.total_cmp(&self.diam).then(self.index.cmp(&other.index))
    }
}

/// Reverse filtration order used for the column sweep.
fn column_order(a: &Entry, b: &Entry) -> Ordering {
    b.diam.total_cmp(&a.diam).then(a.index.cmp(&b.index))
}

struct Binomials {
    table: Vec<Vec<u64>>,
}

impl Binomials {
    /// `C(v, k)` for `v ≤ n`, `k ≤ max_k`; fails if any entry overflows.
    fn new(n: usize, max_k: usize) -> Result<Self, HomologyError> {
        let mut table = vec![vec![0u64; n + 1]; max_k + 1];
        for v in 0..=n {
            table[0][v] = 1;
            for k in 1..=max_k.min(v) {
                let above = if k <= v - 1 { table[k][v - 1] } else { 0 };
                table[k][v] = table[k - 1][v - 1]
                    .checked_add(above)
                    .ok_or(HomologyError::IndexOverflow { n })?;
            }
        }
        Ok(Self { table })
    }

    #[inline]
    fn get(&self, v: usize, k: usize) -> u64 {
        self.table[k][v]
    }
}

struct Rips<'a> {
    dist: &'a DistanceMatrix,
    n: usize,
    threshold: f64,
    binom: Binomials,
}

impl<'a> Rips<'a> {
    fn new(dist: &'a DistanceMatrix, threshold: f64, max_dim: usize) -> Result<Self, HomologyError> {
        let n = dist.n();
        Ok(Self {
            dist,
            n,
            threshold,
            binom: Binomials::new(n, max_dim + 2)?,
        })
    }

    /// Largest `v < top` with `C(v, k) ≤ idx`.
    fn max_vertex(&self, idx: u64, k: usize, top: usize) -> usize {
        let (mut lo, mut hi) = (k - 1, top);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.binom.get(mid, k) <= idx {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Vertices of a `dim`-simplex in decreasing order.
    fn vertices(&self, mut idx: u64, dim: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut top = self.n;
        for k in (1..=dim + 1).rev() {
            let v = self.max_vertex(idx, k, top);
            out.push(v);
            idx -= self.binom.get(v, k);
            top = v;
        }
    }

    fn index_of(&self, verts_desc: &[usize]) -> u64 {
        let m = verts_desc.len();
        verts_desc.iter().enumerate().map(|(i, &v)| self.binom.get(v, m - i)).sum()
    }

    /// Vertex components: one pair per merge, essential classes for the
    /// surviving components. Returns the non-merging edges, which are the
    /// dimension-1 columns.
    fn dim0_pairs(&self, out: &mut Vec<PersistencePair>, budget: usize) -> Result<Vec<Entry>, HomologyError> {
        let n = self.n;
        let mut edges: Vec<Entry> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                (0..i).filter_map(move |j| {
                    let diam = self.dist.get(i, j);
                    (diam <= self.threshold).then(|| Entry {
                        diam,
                        index: self.binom.get(i, 2) + j as u64,
                    })
                })
            })
            .collect();
        if edges.len() > budget {
            return Err(HomologyError::SimplexBudget { dim: 1, count: edges.len(), budget });
        }
        // Filtration order.
        edges.par_sort_unstable_by(|a, b| column_order(b, a));

        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut columns = Vec::new();
        let mut verts = Vec::with_capacity(2);
        for e in &edges {
            self.vertices(e.index, 1, &mut verts);
            let (a, b) = (find(&mut parent, verts[0]), find(&mut parent, verts[1]));
            if a != b {
                // All vertices are born at 0, so the elder rule keeps either root.
                parent[a.max(b)] = a.min(b);
                if e.diam > 0.0 {
                    out.push(PersistencePair { dim: 0, birth: 0.0, death: e.diam });
                }
            } else {
                columns.push(*e);
            }
        }
        for v in 0..n {
            if find(&mut parent, v) == v {
                out.push(PersistencePair { dim: 0, birth: 0.0, death: f64::INFINITY });
            }
        }
        columns.reverse();
        Ok(columns)
    }

    /// All `dim`-simplices within the threshold that were not pivots of the
    /// previous dimension, in column order.
    fn assemble_columns(
        &self,
        dim: usize,
        pivots: &FxHashMap<u64, usize>,
        budget: usize,
    ) -> Result<Vec<Entry>, HomologyError> {
        let n = self.n;
        let mut columns: Vec<Entry> = (0..n)
            .into_par_iter()
            .flat_map_iter(|top| {
                let mut found = Vec::new();
                let mut stack = vec![top];
                self.extend_simplices(&mut stack, dim + 1, 0.0, &mut |verts, diam| {
                    let index = self.index_of(verts);
                    if !pivots.contains_key(&index) {
                        found.push(Entry { diam, index });
                    }
                });
                found.into_iter()
            })
            .collect();
        if columns.len() > budget {
            return Err(HomologyError::SimplexBudget { dim, count: columns.len(), budget });
        }
        columns.par_sort_unstable_by(column_order);
        Ok(columns)
    }

    /// Depth-first enumeration of vertex sets extending `stack` (decreasing)
    /// to `size` vertices with diameter within the threshold.
    fn extend_simplices(&self, stack: &mut Vec<usize>, size: usize, diam: f64, emit: &mut impl FnMut(&[usize], f64)) {
        if stack.len() == size {
            emit(stack, diam);
            return;
        }
        let last = *stack.last().expect("non-empty stack");
        for v in (0..last).rev() {
            let mut d = diam;
            let mut ok = true;
            for &w in stack.iter() {
                let e = self.dist.get(v, w);
                if e > self.threshold {
                    ok = false;
                    break;
                }
                d = d.max(e);
            }
            if ok {
                stack.push(v);
                self.extend_simplices(stack, size, d, emit);
                stack.pop();
            }
        }
    }

    /// Calls `f` for every cofacet of the `dim`-simplex within the threshold,
    /// in decreasing index order. Stops early when `f` returns `false`.
    fn for_each_cofacet(&self, simplex: Entry, dim: usize, verts: &[usize], mut f: impl FnMut(Entry) -> bool) {
        let mut idx_below = simplex.index;
        let mut idx_above = 0u64;
        let mut k = dim + 1;
        let mut v = self.n as isize - 1;
        loop {
            while v >= 0 && self.binom.get(v as usize, k) <= idx_below {
                idx_below -= self.binom.get(v as usize, k);
                idx_above += self.binom.get(v as usize, k + 1);
                v -= 1;
                k -= 1;
            }
            if v < 0 {
                return;
            }
            let vert = v as usize;
            let mut diam = simplex.diam;
            for &w in verts {
                diam = diam.max(self.dist.get(vert, w));
            }
            let index = idx_above + self.binom.get(vert, k + 1) + idx_below;
            v -= 1;
            if diam <= self.threshold && !f(Entry { diam, index }) {
                return;
            }
        }
    }

    /// Reduces the coboundary columns of dimension `dim`, appending pairs to
    /// `out`. Returns the pivot map (cofacet index → column position).
    fn reduce(&self, columns: &[Entry], dim: usize, out: &mut Vec<PersistencePair>) -> FxHashMap<u64, usize> {
        let mut pivot_of: FxHashMap<u64, usize> = FxHashMap::default();
        pivot_of.reserve(columns.len());
        // Reduction-matrix columns beyond the diagonal entry, stored only
        // when non-trivial.
        let mut reduction: FxHashMap<usize, Vec<Entry>> = FxHashMap::default();
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        let mut working: Vec<Entry> = Vec::new();
        let mut verts = Vec::with_capacity(dim + 2);

        for (pos, &column) in columns.iter().enumerate() {
            heap.clear();
            working.clear();
            self.vertices(column.index, dim, &mut verts);

            // Push the full coboundary, but stop at an emergent pair.
            let mut emergent = None;
            let mut check_emergent = true;
            self.for_each_cofacet(column, dim, &verts, |cofacet| {
                heap.push(cofacet);
                if check_emergent && cofacet.diam == column.diam {
                    if !pivot_of.contains_key(&cofacet.index) {
                        emergent = Some(cofacet);
                        return false;
                    }
                    check_emergent = false;
                }
                true
            });
            if let Some(cofacet) = emergent {
                pivot_of.insert(cofacet.index, pos);
                continue;
            }

            let mut pivot = pop_pivot(&mut heap);
            loop {
                match pivot {
                    Some(p) => match pivot_of.get(&p.index) {
                        Some(&other) => {
                            let other_col = columns[other];
                            self.add_column_coboundary(other_col, dim, &mut heap, &mut verts);
                            working.push(other_col);
                            if let Some(extra) = reduction.get(&other) {
                                for &s in extra {
                                    self.add_column_coboundary(s, dim, &mut heap, &mut verts);
                                    working.push(s);
                                }
                            }
                            pivot = pop_pivot(&mut heap);
                        }
                        None => {
                            if p.diam > column.diam {
                                out.push(PersistencePair { dim, birth: column.diam, death: p.diam });
                            }
                            pivot_of.insert(p.index, pos);
                            let extra = cancel_pairs(&mut working);
                            if !extra.is_empty() {
                                reduction.insert(pos, extra);
                            }
                            break;
                        }
                    },
                    None => {
                        out.push(PersistencePair { dim, birth: column.diam, death: f64::INFINITY });
                        break;
                    }
                }
            }
        }
        pivot_of
    }

    fn add_column_coboundary(&self, simplex: Entry, dim: usize, heap: &mut BinaryHeap<Entry>, verts: &mut Vec<usize>) {
        self.vertices(simplex.index, dim, verts);
        self.for_each_cofacet(simplex, dim, verts, |c| {
            heap.push(c);
            true
        });
    }
}

/// Pops entries cancelling equal indices pairwise (Z/2) and returns the
/// earliest surviving entry, leaving it on the heap.
fn pop_pivot(heap: &mut BinaryHeap<Entry>) -> Option<Entry> {
    loop {
        let top = heap.pop()?;
        match heap.peek() {
            Some(next) if next.index == top.index => {
                heap.pop();
            }
            _ => {
                heap.push(top);
                return Some(top);
            }
        }
    }
}

/// Mod-2 sum of a list of simplices.
fn cancel_pairs(entries: &mut Vec<Entry>) -> Vec<Entry> {
    entries.sort_unstable_by_key(|e| e.index);
    let mut out = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let mut j = i;
        while j < entries.len() && entries[j].index == entries[i].index {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(entries[i]);
        }
        i = j;
    }
    out
}
