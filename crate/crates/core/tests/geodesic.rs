mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfgeom::geodesic::{
    isometry_regression, knn_graph, latent_distance, shortest_paths, smooth_path_lengths, GeodesicMatrix, GraphMetric,
    KnnGraph, LatentMetric, NeighborCount, Sources, Window,
};
use rfgeom::DataMatrix;
use support::oracles::floyd_warshall;

const SQUARE: ([f64; 2], [f64; 2]) = ([1.0, 0.0], [0.0, 1.0]);
const HEXAGONAL: ([f64; 2], [f64; 2]) = ([1.0, 0.0], [0.5, 0.866_025_403_784_438_6]);

fn in_rhombus(rng: &mut ChaCha8Rng, (r1, r2): ([f64; 2], [f64; 2])) -> [f64; 2] {
    let (a, b): (f64, f64) = (rng.random(), rng.random());
    [a * r1[0] + b * r2[0], a * r1[1] + b * r2[1]]
}

/// Flat-torus distance by brute force over a 5 × 5 block of translates.
fn brute_teleport(z: [f64; 2], w: [f64; 2], (r1, r2): ([f64; 2], [f64; 2])) -> f64 {
    let mut best = f64::INFINITY;
    for a in -2..=2 {
        for b in -2..=2 {
            let (a, b) = (a as f64, b as f64);
            let t = [w[0] + a * r1[0] + b * r2[0], w[1] + a * r1[1] + b * r2[1]];
            best = best.min((z[0] - t[0]).hypot(z[1] - t[1]));
        }
    }
    best
}

#[test]
fn teleport_is_a_pseudometric_on_random_triples() {
    for basis in [SQUARE, HEXAGONAL] {
        let m = LatentMetric::RhombusTeleport { r1: basis.0, r2: basis.1 };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let (x, y, z) = (in_rhombus(&mut rng, basis), in_rhombus(&mut rng, basis), in_rhombus(&mut rng, basis));
            let d = |a: &[f64; 2], b: &[f64; 2]| latent_distance(&m, a, b).unwrap();
            assert_eq!(d(&x, &y), d(&y, &x));
            assert_eq!(d(&x, &x), 0.0);
            assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
            assert!((d(&x, &y) - brute_teleport(x, y, basis)).abs() < 1e-12);
        }
    }
}

#[test]
fn teleport_identifies_opposite_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (r1, r2) in [SQUARE, HEXAGONAL] {
        let m = LatentMetric::RhombusTeleport { r1, r2 };
        for _ in 0..100 {
            let b: f64 = rng.random();
            let z = [b * r2[0], b * r2[1]];
            let twin = [z[0] + r1[0], z[1] + r1[1]];
            assert!(latent_distance(&m, &z, &twin).unwrap() < 1e-12);
        }
    }
    let m = LatentMetric::RhombusTeleport { r1: SQUARE.0, r2: SQUARE.1 };
    assert!((latent_distance(&m, &[0.05, 0.5], &[0.95, 0.5]).unwrap() - 0.1).abs() < 1e-12);
    assert!(latent_distance(&m, &[1.5, 0.5], &[0.5, 0.5]).is_err());
}

/// Random connected graph on `n` vertices with dyadic weights, so every path
/// sum is exact in floating point.
fn dyadic_graph(rng: &mut ChaCha8Rng, n: usize) -> (Vec<(usize, usize, f64)>, Vec<Vec<f64>>) {
    let mut w = vec![vec![f64::INFINITY; n]; n];
    let mut edges = Vec::new();
    let mut add = |i: usize, j: usize, weight: f64, w: &mut Vec<Vec<f64>>| {
        if weight < w[i][j] {
            w[i][j] = weight;
            w[j][i] = weight;
        }
        edges.push((i, j, weight));
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        add(u, v, rng.random_range(0..64) as f64 / 8.0, &mut w);
    }
    for _ in 0..2 * n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            add(i, j, rng.random_range(0..64) as f64 / 8.0, &mut w);
        }
    }
    (edges, w)
}

#[test]
fn dijkstra_matches_floyd_warshall_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let (edges, w) = dyadic_graph(&mut rng, 50);
        let g = KnnGraph::from_edges(50, &edges).unwrap();
        let d = shortest_paths(&g, &Sources::All).unwrap();
        let oracle = floyd_warshall(&w);
        for i in 0..50 {
            assert_eq!(d.row(i), &oracle[i][..]);
        }
        // Paths compose: the triangle inequality holds without slack.
        for i in 0..50 {
            for m in 0..50 {
                for j in 0..50 {
                    assert!(d.get(i, j) <= d.get(i, m) + d.get(m, j));
                }
            }
        }
    }
}

fn clusters(rng: &mut ChaCha8Rng, centers: &[[f64; 2]], per: usize, spread: f64) -> DataMatrix {
    let rows: Vec<[f64; 2]> = centers
        .iter()
        .flat_map(|c| (0..per).map(|_| [c[0] + spread * rng.random::<f64>(), c[1] + spread * rng.random::<f64>()]).collect::<Vec<_>>())
        .collect();
    DataMatrix::from_rows(&rows).unwrap()
}

#[test]
fn auto_k_is_the_smallest_connecting_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let pts = if trial % 2 == 0 {
            clusters(&mut rng, &[[0.0, 0.0], [5.0, 0.0], [0.0, 7.0]], 15, 1.0)
        } else {
            clusters(&mut rng, &[[0.0, 0.0]], 60, 1.0)
        };
        let g = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Auto).unwrap();
        assert!(g.is_connected());
        if g.k > 1 {
            let smaller = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Fixed(g.k - 1)).unwrap();
            assert!(!smaller.is_connected(), "k = {} also connects", g.k - 1);
        }
    }
}

#[test]
fn geodesics_shrink_as_k_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts = clusters(&mut rng, &[[0.0, 0.0]], 120, 1.0);
    let metric = GraphMetric::Latent { metric: LatentMetric::RhombusTeleport { r1: SQUARE.0, r2: SQUARE.1 } };
    let mut prev: Option<GeodesicMatrix> = None;
    for k in [4, 5, 8, 12, 20] {
        let d = shortest_paths(&knn_graph(&pts, &metric, NeighborCount::Fixed(k)).unwrap(), &Sources::All).unwrap();
        if let Some(p) = &prev {
            assert!(d.as_slice().iter().zip(p.as_slice()).all(|(a, b)| a <= b));
        }
        prev = Some(d);
    }
}

#[test]
fn smoothing_weights_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = rng.random_range(3..40);
        let values: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>() * 10.0).collect();
        let positions = DataMatrix::from_row_major(n, 2, values).unwrap();
        // With every length 1 the smoothed value is the weight sum.
        let ones = GeodesicMatrix::new(n, (0..n).collect(), vec![1.0; n * n]).unwrap();
        let k_smooth = rng.random_range(2..12);
        let s = smooth_path_lengths(&ones, &positions, k_smooth).unwrap();
        assert!(s.lengths.as_slice().iter().all(|v| (v - 1.0).abs() <= 1e-12));
        assert_eq!(s.uniform_fallbacks, 0);
    }
}

#[test]
fn independent_lengths_give_small_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 142; // just over 10⁴ pairs
    let symmetric = |rng: &mut ChaCha8Rng| {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let v: f64 = rng.random();
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        GeodesicMatrix::new(n, (0..n).collect(), m).unwrap()
    };
    let (lz, ly) = (symmetric(&mut rng), symmetric(&mut rng));
    let r = isometry_regression(&lz, &ly, Window::Auto).unwrap();
    assert_eq!(r.pairs_used, n * (n - 1) / 2);
    assert!(r.rho.abs() < 0.2, "ρ = {}", r.rho);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regression_is_invariant_to_rescaling_latent_lengths(seed in 0u64..10_000, c in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = clusters(&mut rng, &[[0.0, 0.0]], 40, 1.0);
        let g = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Auto).unwrap();
        let lz = shortest_paths(&g, &Sources::All).unwrap();
        let ly_vals: Vec<f64> = lz.as_slice().iter().map(|v| 2.0 * v + 0.3 * v.sqrt() + rng.random::<f64>() * 0.01).collect();
        let ly = GeodesicMatrix::new(40, (0..40).collect(), ly_vals).unwrap();
        let scaled = GeodesicMatrix::new(40, (0..40).collect(), lz.as_slice().iter().map(|v| c * v).collect()).unwrap();
        let a = isometry_regression(&lz, &ly, Window::Auto).unwrap();
        let b = isometry_regression(&scaled, &ly, Window::Auto).unwrap();
        prop_assert!((a.rho - b.rho).abs() < 1e-12);
        prop_assert!((a.slope / c - b.slope).abs() <= 1e-9 * a.slope.abs());
        prop_assert!((a.intercept - b.intercept).abs() <= 1e-9 * (1.0 + a.intercept.abs()));
    }

    #[test]
    fn graph_geodesics_satisfy_the_triangle_inequality(seed in 0u64..10_000, k in 3usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = clusters(&mut rng, &[[0.0, 0.0]], 30, 1.0);
        let g = knn_graph(&pts, &GraphMetric::AmbientEuclid, NeighborCount::Fixed(k)).unwrap();
        prop_assume!(g.is_connected());
        let d = shortest_paths(&g, &Sources::All).unwrap();
        for i in 0..30 {
            prop_assert_eq!(d.get(i, i), 0.0);
            for m in 0..30 {
                for j in 0..30 {
                    let (a, b, c) = (d.get(i, j), d.get(i, m), d.get(m, j));
                    prop_assert!(a <= (b + c) * (1.0 + 1e-12));
                    prop_assert!((d.get(i, j) - d.get(j, i)).abs() <= 1e-12 * (1.0 + a));
                }
            }
        }
    }
}
