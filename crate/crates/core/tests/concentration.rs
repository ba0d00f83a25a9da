use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfgeom::concentration::{
    ambient_intrinsic_dim, ghw_tail_bound, gram_stats, max_gram_deviation, rate_study, ConcentrationError, Normalization,
    RateTemplate,
};
use rfgeom::model::{make_feature_map, noise_free_gram, sample_data, sample_latent, Family, FeatureMapRequest, LatentSpace, ModelSpec, SamplingScheme};
use rfgeom::stats::median;
use rfgeom::DataMatrix;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DataMatrix {
    DataMatrix::from_row_major(n, p, (0..n * p).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()).unwrap()
}

#[test]
fn gram_matches_a_triple_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n, p) in [(10, 20), (5, 7)] {
        let y = random_matrix(&mut rng, n, p);
        let g = gram_stats(&y, true).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..p {
                    dot += y.get(i, k) * y.get(j, k);
                }
                assert!((g.gram[(i, j)] - dot).abs() <= 1e-12);
                assert_eq!(g.gram[(i, j)], g.gram[(j, i)]);
                let cos = g.cosine.as_ref().unwrap()[(i, j)];
                assert!(cos.abs() <= 1.0 + 1e-12);
            }
            assert!((g.cosine.as_ref().unwrap()[(i, i)] - 1.0).abs() < 1e-15);
        }
    }
    let zero = DataMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
    assert!(matches!(gram_stats(&zero, true), Err(ConcentrationError::ZeroNormRow { row: 1 })));
}

#[test]
fn toy_circle_deviation_shrinks_with_p() {
    let devs = |p: usize| -> Vec<f64> {
        (0..20)
            .map(|seed| {
                let latent = sample_latent(&LatentSpace::Circle { radius: 1.0 }, 200, SamplingScheme::UniformGrid, seed).unwrap();
                let spec = ModelSpec::new(make_feature_map(FeatureMapRequest::ToyCircle { p }).unwrap(), 0.02f64.sqrt(), seed);
                let y = sample_data(&spec, &latent).unwrap();
                let t = noise_free_gram(&spec, &latent).unwrap();
                max_gram_deviation(&y, &t, spec.sigma, Normalization::ByP, true, false).unwrap().max_abs_deviation
            })
            .collect()
    };
    let (small, large) = (median(&devs(50)).unwrap(), median(&devs(400)).unwrap());
    assert!(large < small, "p=400: {large}, p=50: {small}");
}

#[test]
fn iid_rate_slope_and_boundedness() {
    let grid: Vec<(usize, usize)> = [64, 128, 256, 512, 1024].iter().map(|&p| (100, p)).collect();
    let study = rate_study(&RateTemplate::Iid { family: Family::Gaussian }, &grid, 10, 0).unwrap();
    assert!((0.85..=1.15).contains(&study.fitted_slope), "slope {}", study.fitted_slope);
    let r = study.rescaled_medians();
    let spread = r.iter().copied().fold(0.0, f64::max) / r.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(spread < 2.0, "spread {spread}");
    assert_eq!(study.medians.len(), grid.len());
    assert!(matches!(
        rate_study(&RateTemplate::Iid { family: Family::Gaussian }, &grid[..1], 10, 0),
        Err(ConcentrationError::DegenerateGrid(_))
    ));
}

#[test]
fn self_normalized_gamma_is_one_without_noise() {
    // With σ = 0 the observed cosines are compared with the plain feature
    // cosines; a positive rescaling of each row changes nothing.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let phi = random_matrix(&mut rng, 6, 4);
    let t = gram_stats(&phi, false).unwrap().gram;
    let rows: Vec<Vec<f64>> = phi.rows_iter().enumerate().map(|(i, r)| r.iter().map(|v| v * (1.0 + i as f64)).collect()).collect();
    let y = DataMatrix::from_rows(&rows).unwrap();
    let r = max_gram_deviation(&y, &t, 0.0, Normalization::SelfNormalized, false, false).unwrap();
    assert!(r.max_abs_deviation < 1e-14);
}

proptest! {
    #[test]
    fn intrinsic_dimension_is_scale_invariant(spec in proptest::collection::vec(0.0f64..10.0, 1..20), c in 0.001f64..1000.0) {
        prop_assume!(spec.iter().any(|&v| v > 0.0));
        let a = ambient_intrinsic_dim(&spec).unwrap();
        let scaled: Vec<f64> = spec.iter().map(|v| v * c).collect();
        prop_assert!((ambient_intrinsic_dim(&scaled).unwrap() - a).abs() <= 1e-12 * a);
        prop_assert!(a >= 1.0 && a <= spec.iter().filter(|&&v| v > 0.0).count() as f64 + 1e-12);
    }

    #[test]
    fn tail_bound_shape(frob in 0.1f64..10.0, spec in 0.1f64..10.0, k in 0.5f64..3.0, t in 0.0f64..20.0, dt in 0.0f64..5.0, a in 0.1f64..10.0) {
        let b = ghw_tail_bound(frob, spec, k, t, 1.0).unwrap();
        prop_assert!(b > 0.0 && b <= 2.0);
        prop_assert!(ghw_tail_bound(frob, spec, k, t + dt, 1.0).unwrap() <= b);
        prop_assert!(ghw_tail_bound(frob, spec, k * 1.5, t, 1.0).unwrap() >= b);
        let rescaled = ghw_tail_bound(a * frob, a * spec, k, a * t, 1.0).unwrap();
        prop_assert!((rescaled - b).abs() <= 1e-12);
    }
}

#[test]
fn tail_bound_values() {
    assert_eq!(ghw_tail_bound(1.0, 1.0, 1.0, 0.0, 1.0).unwrap(), 2.0);
    assert!((ghw_tail_bound(1.0, 1.0, 1.0, 1.0, 1.0).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    assert!(ghw_tail_bound(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    assert_eq!(ambient_intrinsic_dim(&[2.0, 1.0, 1.0]).unwrap(), 2.0);
    assert!(ambient_intrinsic_dim(&[0.0, 0.0]).is_err());
}
