use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{knn_graph, GeodesicError, GraphMetric, KnnGraph, NeighborCount};
use crate::model::{DataMatrix, RhombusBasis};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sources {
    All,
    Subset(Vec<usize>),
}

/// Shortest-path lengths from each source (row) to every vertex (column).
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicMatrix {
    n: usize,
    sources: Vec<usize>,
    lengths: Vec<f64>,
    /// Whether every source covers every vertex.
    pub all_sources: bool,
}

impl GeodesicMatrix {
    /// Wraps precomputed lengths, `sources.len() × n` row-major.
    pub fn new(n: usize, sources: Vec<usize>, lengths: Vec<f64>) -> Result<Self, GeodesicError> {
        if lengths.len() != sources.len() * n || sources.iter().any(|&s| s >= n) {
            return Err(GeodesicError::DimensionMismatch(format!(
                "{} lengths for {} sources over {n} vertices",
                lengths.len(),
                sources.len()
            )));
        }
        let all_sources = sources.len() == n && sources.iter().enumerate().all(|(i, &s)| i == s);
        Ok(Self { n, sources, lengths, all_sources })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Lengths from the `row`-th source.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.lengths[row * self.n..(row + 1) * self.n]
    }

    /// Length from the `row`-th source to vertex `j`.
    pub fn get(&self, row: usize, j: usize) -> f64 {
        self.lengths[row * self.n + j]
    }

    pub fn has_unreachable(&self) -> bool {
        self.lengths.iter().any(|l| l.is_infinite())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lengths
    }
}

#[derive(Clone, Copy, PartialEq)]
struct State {
    dist: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(g: &KnnGraph, source: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(State { dist: 0.0, vertex: source });
    while let Some(State { dist, vertex }) = heap.pop() {
        if dist > out[vertex] {
            continue;
        }
        for &(w, weight) in g.neighbors(vertex) {
            let candidate = dist + weight;
            if candidate < out[w] {
                out[w] = candidate;
                heap.push(State { dist: candidate, vertex: w });
            }
        }
    }
}

/// Single-source Dijkstra from every requested source, in parallel.
/// Unreachable vertices get `+∞`.
pub fn shortest_paths(g: &KnnGraph, sources: &Sources) -> Result<GeodesicMatrix, GeodesicError> {
    let n = g.n();
    for v in 0..n {
        if let Some(&(w, weight)) = g.neighbors(v).iter().find(|e| !(e.1 >= 0.0)) {
            return Err(GeodesicError::InvalidWeight { from: v, to: w, weight });
        }
    }
    let sources: Vec<usize> = match sources {
        Sources::All => (0..n).collect(),
        Sources::Subset(s) => {
            if let Some(&bad) = s.iter().find(|&&s| s >= n) {
                return Err(GeodesicError::InvalidArgument(format!("source {bad} out of range for {n} vertices")));
            }
            s.clone()
        }
    };
    let mut lengths = vec![0.0; sources.len() * n];
    if n > 0 {
        lengths
            .par_chunks_mut(n)
            .zip(sources.par_iter())
            .for_each(|(row, &s)| dijkstra(g, s, row));
    }
    GeodesicMatrix::new(n, sources, lengths)
}

/// Flat-torus geodesics by explicit re-tessellation: the points are copied
/// into the eight rhombi around the central one, a k-NN graph is built on
/// all `9n` copies, and the length to `j` is the minimum over its copies of
/// the path from the central copy of the source.
pub fn retessellated_geodesics(
    points: &DataMatrix,
    r1: [f64; 2],
    r2: [f64; 2],
    k: NeighborCount,
    sources: &Sources,
) -> Result<GeodesicMatrix, GeodesicError> {
    let basis = RhombusBasis::new(r1, r2)?;
    if points.ncols() != 2 {
        return Err(GeodesicError::DimensionMismatch("positions must be 2-dimensional".into()));
    }
    if let Some(index) = points.rows_iter().position(|z| !basis.contains(z)) {
        return Err(GeodesicError::OutsideDomain { index });
    }
    let n = points.nrows();
    // Copy c = 0 is the central rhombus.
    let shifts = [(0.0, 0.0), (-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)];
    let mut values = Vec::with_capacity(9 * n * 2);
    for &(a, b) in &shifts {
        let t = basis.point(a, b);
        for z in points.rows_iter() {
            values.push(z[0] + t[0]);
            values.push(z[1] + t[1]);
        }
    }
    let tiled = DataMatrix::from_row_major(9 * n, 2, values)?;
    let graph = knn_graph(&tiled, &GraphMetric::AmbientEuclid, k)?;
    // Sources live in the central copy, not the whole tiling.
    let central = match sources {
        Sources::All => Sources::Subset((0..n).collect()),
        Sources::Subset(s) => {
            if let Some(&bad) = s.iter().find(|&&v| v >= n) {
                return Err(GeodesicError::DimensionMismatch(format!("source {bad} out of range for {n} points")));
            }
            Sources::Subset(s.clone())
        }
    };
    let full = shortest_paths(&graph, &central)?;
    let mut lengths = Vec::with_capacity(full.sources().len() * n);
    for row in 0..full.sources().len() {
        let r = full.row(row);
        lengths.extend((0..n).map(|j| (0..9).map(|c| r[c * n + j]).fold(f64::INFINITY, f64::min)));
    }
    GeodesicMatrix::new(n, full.sources().to_vec(), lengths)
}
