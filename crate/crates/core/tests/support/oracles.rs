//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use rfgeom::homology::{DistanceMatrix, PersistencePair};

/// Rips persistence by plain column reduction of the full boundary matrix
/// over Z/2. Zero-persistence pairs dropped; output sorted.
pub fn naive_rips(d: &DistanceMatrix, max_dim: usize, threshold: f64) -> Vec<PersistencePair> {
    let n = d.n();
    let mut simplices: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(s) = stack.pop() {
        let diam = s
            .iter()
            .flat_map(|&a| s.iter().map(move |&b| (a, b)))
            .map(|(a, b)| d.get(a, b))
            .fold(0.0, f64::max);
        if diam > threshold {
            continue;
        }
        if s.len() < max_dim + 2 {
            for v in s.last().unwrap() + 1..n {
                let mut t = s.clone();
                t.push(v);
                stack.push(t);
            }
        }
        simplices.push((diam, s));
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    let position: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.1.clone(), i)).collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, s)| {
            let mut col: Vec<usize> = if s.len() == 1 {
                Vec::new()
            } else {
                (0..s.len())
                    .map(|skip| {
                        let face: Vec<usize> =
                            s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                        position[&face]
                    })
                    .collect()
            };
            col.sort_unstable();
            col
        })
        .collect();

    let mut low_owner: std::collections::HashMap<usize, usize> = Default::default();
    let mut paired = vec![false; simplices.len()];
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    columns[j] = sym_diff(&columns[j], &other);
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let dim = simplices[low].1.len() - 1;
            let (b, dth) = (simplices[low].0, simplices[j].0);
            if dth > b {
                pairs.push(PersistencePair { dim, birth: b, death: dth });
            }
        }
    }
    for (i, (diam, s)) in simplices.iter().enumerate() {
        let dim = s.len() - 1;
        if !paired[i] && dim <= max_dim {
            pairs.push(PersistencePair { dim, birth: *diam, death: f64::INFINITY });
        }
    }
    pairs.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
    pairs
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Bottleneck distance by enumerating every partial matching of the finite
/// points; unmatched points go to the diagonal.
pub fn exhaustive_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut best = f64::INFINITY;
    assign(a, b, 0, &mut used, 0.0, &mut best);
    best
}

fn assign(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: &mut [bool], worst: f64, best: &mut f64) {
    if i == a.len() {
        let rest = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| (b[j].1 - b[j].0) / 2.0)
            .fold(worst, f64::max);
        *best = best.min(rest);
        return;
    }
    assign(a, b, i + 1, used, worst.max((a[i].1 - a[i].0) / 2.0), best);
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            let c = (a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs());
            assign(a, b, i + 1, used, worst.max(c), best);
            used[j] = false;
        }
    }
}

/// All-pairs shortest paths on a dense weight matrix (`∞` for no edge).
pub fn floyd_warshall(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = w.len();
    let mut d = w.to_vec();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Directed Hausdorff by brute force over rows.
pub fn brute_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dist = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let dir = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter().map(|x| b.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    dir(a, b).max(dir(b, a))
}
