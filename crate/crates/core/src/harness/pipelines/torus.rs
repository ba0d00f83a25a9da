use serde_json::{json, Value};

use super::toy::extreme_indices;
use super::{tally, Context};
use crate::geodesic::{retessellated_geodesics, GraphMetric, LatentMetric};
use crate::harness::common::{
    choose_sources, graph_geodesics, neighbor_count, regress_and_write, rhombus, seeds, subsample, torus_draw,
};
use crate::harness::{Check, HarnessError};
use crate::homology::{betti_estimate, distance_matrix, rips_persistence_with_budget, scale_rows};
use crate::stats::sign_test_p;

const TELEPORT: &str = "rhombus_teleport";
const EUCLID: &str = "rhombus_euclid";

pub(super) fn run(ctx: &mut Context) -> Result<Value, HarnessError> {
    let cfg = ctx.cfg;
    if cfg.n < 300 {
        return Err(HarnessError::Config(format!("the torus experiment needs n ≥ 300, got {}", cfg.n)));
    }
    if cfg.p_values.iter().any(|&p| p < 4) {
        return Err(HarnessError::Config("the Clifford-torus features have rank 4, so p ≥ 4 is required".into()));
    }
    let (r1, r2) = rhombus(cfg);
    let seeds = seeds(cfg);
    ctx.seeds_used = seeds.clone();
    ctx.units = vec![
        format!("persistence: Rips on {:?}-scaled rows of a seeded subsample", cfg.scaling),
        "Ly: k-NN graph geodesics of p^{-1/2}Y; Lz: k-NN graph geodesics of the latent points under each metric".into(),
        "torus_3d_R{ratio}: chordal metric on a torus with R/r = ratio, r = 1, on the angle pairs".into(),
    ];
    let mut metrics = vec![
        (EUCLID.to_string(), LatentMetric::RhombusEuclid { r1, r2 }),
        (TELEPORT.to_string(), LatentMetric::RhombusTeleport { r1, r2 }),
    ];
    for &ratio in &cfg.torus_ratios {
        metrics.push((format!("torus_3d_R{ratio}"), LatentMetric::Torus3D { major: ratio, minor: 1.0 }));
    }

    let mut per_p = Vec::new();
    // Per p, per seed.
    let mut bettis: Vec<Vec<[usize; 3]>> = Vec::new();
    let mut rhos: Vec<Vec<Vec<(String, f64, f64)>>> = Vec::new();
    for &p in &cfg.p_values {
        let mut runs = Vec::new();
        let mut bs = Vec::new();
        let mut rs = Vec::new();
        for (s, &seed) in seeds.iter().enumerate() {
            let draw = ctx.stage(&format!("sample p={p} seed={seed}"), |_| torus_draw(cfg, cfg.n, p, seed))?;
            let mut run = serde_json::Map::new();
            run.insert("seed".into(), json!(seed));
            if cfg.homology {
                let (dgm, betti) = ctx.stage(&format!("rips p={p} seed={seed}"), |_| {
                    let idx = subsample(draw.y.nrows(), cfg.n_sub, seed);
                    let d = distance_matrix(&draw.y.select_rows(&idx), cfg.scaling)?;
                    let dgm = rips_persistence_with_budget(&d, cfg.max_dim, cfg.max_edge, cfg.simplex_budget)?;
                    let betti = betti_estimate(&dgm, cfg.ratio_threshold)?;
                    Ok((dgm, betti))
                })?;
                if s == 0 {
                    let file = ctx.writer.write(&format!("torus/diagram_p{p}.csv"), dgm.to_csv().as_bytes())?;
                    run.insert("diagram".into(), json!(file));
                }
                bs.push(betti.counts);
                run.insert("betti".into(), serde_json::to_value(&betti)?);
            }

            let sources = choose_sources(cfg.n, cfg.max_pairs, seed);
            let k = neighbor_count(cfg);
            let (ly, k_y) = ctx.stage(&format!("observed geodesics p={p} seed={seed}"), |_| {
                graph_geodesics(&scale_rows(&draw.y, cfg.scaling)?, &GraphMetric::AmbientEuclid, k, &sources)
            })?;
            run.insert("kObserved".into(), json!(k_y));
            let angles = &draw.inputs.points;
            let mut reports = serde_json::Map::new();
            let mut seed_rhos = Vec::new();
            for (name, metric) in &metrics {
                let points = match metric {
                    LatentMetric::Torus3D { .. } => angles,
                    _ => &draw.latent.points,
                };
                let (lz, k_z) = ctx.stage(&format!("{name} geodesics p={p} seed={seed}"), |_| {
                    graph_geodesics(points, &GraphMetric::Latent { metric: *metric }, k, &sources)
                })?;
                let file = format!("torus/moving_average_{name}_p{p}_seed{seed}.csv");
                let (report, path) = regress_and_write(&mut ctx.writer, &file, &lz, &ly)?;
                seed_rhos.push((name.clone(), report.rho, report.intercept));
                reports.insert(name.clone(), json!({ "k": k_z, "report": report, "movingAverage": path }));
            }
            if cfg.retessellate {
                let lz = ctx.stage(&format!("retessellated geodesics p={p} seed={seed}"), |_| {
                    Ok(retessellated_geodesics(&draw.latent.points, r1, r2, k, &sources)?)
                })?;
                let name = "rhombus_retessellated";
                let file = format!("torus/moving_average_{name}_p{p}_seed{seed}.csv");
                let (report, path) = regress_and_write(&mut ctx.writer, &file, &lz, &ly)?;
                seed_rhos.push((name.to_string(), report.rho, report.intercept));
                reports.insert(name.into(), json!({ "report": report, "movingAverage": path }));
            }
            run.insert("isometry".into(), Value::Object(reports));
            runs.push(Value::Object(run));
            rs.push(seed_rhos);
        }
        per_p.push(json!({ "p": p, "runs": runs }));
        bettis.push(bs);
        rhos.push(rs);
    }

    let (_, hi) = extreme_indices(&cfg.p_values);
    let p_hi = cfg.p_values[hi];
    if cfg.homology {
        let flags: Vec<bool> = bettis[hi].iter().map(|b| *b == [1, 2, 1]).collect();
        let (k, frac) = tally(&flags);
        ctx.checks.push(Check::hard(
            "betti_torus",
            cfg.max_dim == 2 && 10 * k >= 9 * flags.len(),
            format!("(H0, H1, H2) = (1, 2, 1) at p={p_hi} on {frac} seeds (≥ 90% required, max_dim 2)"),
        ));
    }
    let get = |run: &[(String, f64, f64)], name: &str| run.iter().find(|r| r.0 == name).map(|r| (r.1, r.2));
    let runs = &rhos[hi];
    let teleport: Vec<(f64, f64)> = runs.iter().map(|r| get(r, TELEPORT).expect("teleport metric")).collect();
    let euclid: Vec<f64> = runs.iter().map(|r| get(r, EUCLID).expect("euclid metric").0).collect();

    let flags: Vec<bool> = teleport.iter().map(|t| t.0 > 0.99).collect();
    let (k, frac) = tally(&flags);
    ctx.checks.push(Check::soft("teleport_rho_above_0.99", 10 * k >= 9 * flags.len(), format!("ρ > 0.99 on {frac} seeds")));
    let flags: Vec<bool> = teleport.iter().zip(&euclid).map(|(t, e)| t.0 > *e).collect();
    let (k, frac) = tally(&flags);
    ctx.checks.push(Check::soft(
        "teleport_beats_euclid",
        10 * k >= 9 * flags.len(),
        format!("ρ(teleport) > ρ(euclid) on {frac} seeds"),
    ));
    for &ratio in &cfg.torus_ratios {
        let name = format!("torus_3d_R{ratio}");
        let flags: Vec<bool> = runs.iter().zip(&teleport).map(|(r, t)| t.0 > get(r, &name).expect("torus metric").0).collect();
        let (k, frac) = tally(&flags);
        ctx.checks.push(Check::soft(
            &format!("teleport_beats_{name}"),
            10 * k >= 9 * flags.len(),
            format!("ρ(teleport) > ρ({name}) on {frac} seeds"),
        ));
    }
    if cfg.sigma_sq > 0.0 {
        let flags: Vec<bool> = teleport.iter().map(|t| t.1 > 0.0).collect();
        let (k, frac) = tally(&flags);
        let pval = sign_test_p(k, flags.len());
        ctx.checks.push(Check::soft(
            "teleport_intercept_positive",
            pval < 0.05,
            format!("intercept > 0 on {frac} seeds, one-sided sign test p = {pval:.4}"),
        ));
    }
    Ok(json!({ "perP": per_p }))
}
