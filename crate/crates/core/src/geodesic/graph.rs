use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GeodesicError, LatentMetric};
use crate::model::{euclidean, DataMatrix};

/// Metric used to build a neighbour graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum GraphMetric {
    Latent { metric: LatentMetric },
    /// Euclidean distance between rows of any width.
    AmbientEuclid,
}

impl GraphMetric {
    fn check(&self, points: &DataMatrix) -> Result<(), GeodesicError> {
        match self {
            GraphMetric::Latent { metric } => metric.check_points(points),
            GraphMetric::AmbientEuclid => Ok(()),
        }
    }

    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            GraphMetric::Latent { metric } => metric.eval(a, b),
            GraphMetric::AmbientEuclid => euclidean(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborCount {
    Fixed(usize),
    /// Smallest k whose symmetrised graph is connected.
    Auto,
}

/// Undirected weighted graph with sorted, duplicate-free adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    n: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
    pub k: usize,
    pub symmetrized: bool,
}

impl KnnGraph {
    /// Builds an undirected graph from an edge list. Parallel edges keep the
    /// smallest weight; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GeodesicError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(from, to, weight) in edges {
            if from >= n || to >= n {
                return Err(GeodesicError::InvalidArgument(format!("edge {from}-{to} out of range for {n} vertices")));
            }
            if !(weight >= 0.0) || !weight.is_finite() {
                return Err(GeodesicError::InvalidWeight { from, to, weight });
            }
            if from != to {
                adjacency[from].push((to, weight));
                adjacency[to].push((from, weight));
            }
        }
        for list in &mut adjacency {
            normalise(list);
        }
        Ok(Self { n, adjacency, k: 0, symmetrized: true })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

fn normalise(list: &mut Vec<(usize, f64)>) {
    list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    list.dedup_by_key(|e| e.0);
}

/// k-nearest-neighbour graph of the rows of `points`, symmetrised by union.
///
/// Ties in distance go to the smaller index. Under [`NeighborCount::Auto`],
/// k is the smallest value for which the graph is connected.
pub fn knn_graph(points: &DataMatrix, metric: &GraphMetric, k: NeighborCount) -> Result<KnnGraph, GeodesicError> {
    let n = points.nrows();
    if n < 2 {
        return Err(GeodesicError::InvalidArgument(format!("k-NN graph needs at least 2 points, got {n}")));
    }
    metric.check(points)?;
    let k = match k {
        NeighborCount::Fixed(0) => return Err(GeodesicError::InvalidArgument("k must be positive".into())),
        NeighborCount::Fixed(k) => k.min(n - 1),
        NeighborCount::Auto => auto_k(points, metric),
    };
    let lists = neighbor_lists(points, metric, k);
    Ok(assemble(n, &lists, k))
}

fn assemble(n: usize, lists: &[Vec<(usize, f64)>], k: usize) -> KnnGraph {
    let mut adjacency = vec![Vec::new(); n];
    for (i, list) in lists.iter().enumerate() {
        for &(j, w) in &list[..k.min(list.len())] {
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
    }
    for list in &mut adjacency {
        normalise(list);
    }
    KnnGraph { n, adjacency, k, symmetrized: true }
}

/// The `k` nearest other points of every point, closest first.
pub(super) fn neighbor_lists(points: &DataMatrix, metric: &GraphMetric, k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = points.nrows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let zi = points.row(i);
            let mut all: Vec<(usize, f64)> =
                (0..n).filter(|&j| j != i).map(|j| (j, metric.eval(zi, points.row(j)))).collect();
            let order = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
            if k < all.len() {
                all.select_nth_unstable_by(k, order);
                all.truncate(k);
            }
            all.sort_by(order);
            all
        })
        .collect()
}

/// Smallest k making the symmetrised graph connected. Neighbour lists are
/// grown by doubling; edges are fed to a union-find in rank order.
fn auto_k(points: &DataMatrix, metric: &GraphMetric) -> usize {
    let n = points.nrows();
    let mut cap = 8.min(n - 1);
    loop {
        let lists = neighbor_lists(points, metric, cap);
        let mut parent: Vec<usize> = (0..n).collect();
        let mut components = n;
        for k in 1..=cap {
            for (i, list) in lists.iter().enumerate() {
                let j = list[k - 1].0;
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
            if components == 1 {
                return k;
            }
        }
        // The complete graph is connected, so this terminates at n − 1.
        cap = (cap * 2).min(n - 1);
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> DataMatrix {
        DataMatrix::from_rows(&xs.iter().map(|&x| [x, 0.0]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn collinear_points_form_a_path() {
        let g = knn_graph(&line(&[0.0, 1.0, 2.0]), &GraphMetric::AmbientEuclid, NeighborCount::Fixed(1)).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[(0, 1.0), (2, 1.0)]);
    }

    #[test]
    fn auto_bridges_two_clusters() {
        let pts = line(&[0.0, 0.1, 0.2, 10.0, 10.1, 10.2]);
        let fixed = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Fixed(1)).unwrap();
        assert!(!fixed.is_connected());
        let auto = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Auto).unwrap();
        assert!(auto.is_connected());
        assert_eq!(auto.k, 3);
        let less = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Fixed(auto.k - 1)).unwrap();
        assert!(!less.is_connected());
    }

    #[test]
    fn ties_prefer_smaller_index() {
        // Points 0 and 2 are both at distance 1 from point 1.
        let g = knn_graph(&line(&[0.0, 1.0, 2.0, 10.0]), &GraphMetric::AmbientEuclid, NeighborCount::Fixed(1)).unwrap();
        assert!(g.neighbors(1).iter().any(|&(j, _)| j == 0));
        assert!(g.neighbors(0).iter().all(|&(j, _)| j != 2));
    }

    #[test]
    fn duplicates_and_errors() {
        let g = knn_graph(&line(&[0.0, 0.0, 1.0]), &GraphMetric::AmbientEuclid, NeighborCount::Fixed(1)).unwrap();
        assert_eq!(g.neighbors(0), &[(1, 0.0), (2, 1.0)]);
        assert!(knn_graph(&line(&[0.0]), &GraphMetric::AmbientEuclid, NeighborCount::Auto).is_err());
        let rhombus = GraphMetric::Latent { metric: LatentMetric::RhombusEuclid { r1: [1.0, 0.0], r2: [0.0, 1.0] } };
        assert!(matches!(
            knn_graph(&line(&[0.5, 2.0]), &rhombus, NeighborCount::Fixed(1)),
            Err(GeodesicError::OutsideDomain { index: 1 })
        ));
        assert!(KnnGraph::from_edges(2, &[(0, 1, -1.0)]).is_err());
    }
}
