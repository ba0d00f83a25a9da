use serde_json::{json, Value};

use super::toy::extreme_indices;
use super::{tally, Context};
use crate::concentration::gram_stats;
use crate::harness::common::{circle_draw, reference_features, seeds, subsample, torus_draw, Draw};
use crate::harness::{Check, HarnessError, Manifold};
use crate::homology::{
    bottleneck_distance, distance_matrix, gh_upper_bound, hausdorff_distance, rips_persistence_with_budget, Scaling,
};
use crate::model::noise_free_gram;
use crate::stats::median;

/// Slack added to the right-hand side of the chain for rounding.
const CHAIN_TOL: f64 = 1e-9;

/// Latent points in the dense reference sample of the manifold.
const REFERENCE_POINTS: usize = 4096;

pub(super) fn run(ctx: &mut Context) -> Result<Value, HarnessError> {
    let cfg = ctx.cfg;
    if cfg.p_values.len() < 2 {
        return Err(HarnessError::Config(format!(
            "persistence consistency needs at least 2 p values, got {}",
            cfg.p_values.len()
        )));
    }
    let seeds = seeds(cfg);
    ctx.seeds_used = seeds.clone();
    ctx.units = vec![
        "diagrams: Rips on p^{-1/2}Y and p^{-1/2}Φ of the same subsample".into(),
        "ghUpperBound: √(max |Y_i·Y_j − φ_i·φ_j| / p); hausdorff: p^{-1/2}Φ of the subsample vs a dense grid".into(),
        "chain: bottleneck ≤ 2(hausdorff + ghUpperBound) + 1e-9 per dimension".into(),
    ];

    let mut cells = Vec::new();
    let mut chain_ok = Vec::new();
    // Per p, per seed: H1 bottleneck distance.
    let mut h1: Vec<Vec<f64>> = Vec::new();
    for &p in &cfg.p_values {
        let reference = ctx.stage(&format!("reference p={p}"), |_| reference_features(cfg, p, REFERENCE_POINTS))?;
        let mut h1_p = Vec::new();
        for &seed in &seeds {
            let draw: Draw = ctx.stage(&format!("sample p={p} seed={seed}"), |_| match cfg.manifold {
                Manifold::Circle => circle_draw(cfg, cfg.n, p, seed),
                Manifold::Torus => torus_draw(cfg, cfg.n, p, seed),
            })?;
            let idx = subsample(draw.y.nrows(), cfg.n_sub, seed);
            let cell = ctx.stage(&format!("persistence p={p} seed={seed}"), |_| {
                let y = draw.y.select_rows(&idx);
                let phi = draw.scaled_features(&idx)?;
                let dgm_y = rips_persistence_with_budget(
                    &distance_matrix(&y, Scaling::InvSqrtP)?,
                    cfg.max_dim,
                    None,
                    cfg.simplex_budget,
                )?;
                let dgm_phi =
                    rips_persistence_with_budget(&distance_matrix(&phi, Scaling::Raw)?, cfg.max_dim, None, cfg.simplex_budget)?;
                let gram_y = gram_stats(&y, false)?.gram;
                let gram_phi = noise_free_gram(&draw.spec, &draw.inputs.select(&idx))?;
                let gh = gh_upper_bound(&gram_y, &gram_phi, p)?;
                let dh = hausdorff_distance(&phi, &reference)?;
                let bound = 2.0 * (dh + gh) + CHAIN_TOL;
                let db: Vec<f64> = (0..=cfg.max_dim)
                    .map(|dim| {
                        let b = bottleneck_distance(&dgm_y, &dgm_phi, dim);
                        if b.essential_mismatch { f64::INFINITY } else { b.distance }
                    })
                    .collect();
                Ok((db, gh, dh, bound))
            })?;
            let (db, gh, dh, bound) = cell;
            let holds = db.iter().all(|&b| b <= bound);
            chain_ok.push(holds);
            if cfg.max_dim >= 1 {
                h1_p.push(db[1]);
            }
            cells.push(json!({
                "p": p,
                "seed": seed,
                "bottleneck": db.iter().map(|&b| finite_or_null(b)).collect::<Vec<_>>(),
                "ghUpperBound": gh,
                "hausdorff": dh,
                "chainBound": bound,
                "chainHolds": holds,
            }));
        }
        h1.push(h1_p);
    }

    let (k, frac) = tally(&chain_ok);
    ctx.checks.push(Check::hard(
        "bottleneck_chain",
        k == chain_ok.len(),
        format!("chain holds on {frac} (p, seed) cells"),
    ));
    let mut medians = Vec::new();
    if cfg.max_dim >= 1 {
        medians = h1.iter().map(|v| median(v).unwrap_or(f64::NAN)).collect();
        let (lo, hi) = extreme_indices(&cfg.p_values);
        ctx.checks.push(Check::soft(
            "h1_bottleneck_decreases_in_p",
            medians[hi] <= medians[lo],
            format!(
                "median H1 bottleneck {:.4e} at p={} vs {:.4e} at p={}",
                medians[hi], cfg.p_values[hi], medians[lo], cfg.p_values[lo]
            ),
        ));
    }
    Ok(json!({
        "cells": cells,
        "medianH1Bottleneck": cfg.p_values.iter().zip(&medians).map(|(p, m)| json!({ "p": p, "median": finite_or_null(*m) })).collect::<Vec<_>>(),
    }))
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() { json!(v) } else { Value::Null }
}
