use serde_json::{json, Value};

use super::{tally, Context};
use crate::concentration::{max_gram_deviation, Normalization};
use crate::harness::common::{circle_draw, seeds, subsample};
use crate::harness::{top_components, Check, HarnessError};
use crate::homology::{betti_estimate, distance_matrix, rips_persistence_with_budget};
use crate::model::noise_free_gram;

pub(super) fn run(ctx: &mut Context) -> Result<Value, HarnessError> {
    let cfg = ctx.cfg;
    if let Some(&p) = cfg.p_values.iter().find(|&&p| p < 3) {
        return Err(HarnessError::Config(format!("the toy circle has rank 3, so p ≥ 3 is required (got {p})")));
    }
    let seeds = seeds(cfg);
    ctx.seeds_used = seeds.clone();
    ctx.units = vec![
        "deviation: max |Y_i·Y_j/p − φ_i·φ_j/p − σ²1[i=j]| over all i, j".into(),
        format!("persistence: Rips on {:?}-scaled rows of a seeded subsample", cfg.scaling),
        "svd: rank-3 coordinates of the raw data matrix".into(),
    ];
    let mut per_p = Vec::new();
    // Per p, then per seed.
    let mut deviations: Vec<Vec<f64>> = Vec::new();
    let mut energies: Vec<Vec<f64>> = Vec::new();
    let mut bettis: Vec<Vec<[usize; 3]>> = Vec::new();
    for &p in &cfg.p_values {
        let mut devs = Vec::new();
        let mut ens = Vec::new();
        let mut bs = Vec::new();
        let mut dgm_file = None;
        let mut svd_file = None;
        for (s, &seed) in seeds.iter().enumerate() {
            let draw = ctx.stage(&format!("sample p={p} seed={seed}"), |_| circle_draw(cfg, cfg.n, p, seed))?;
            let dev = ctx.stage(&format!("deviation p={p} seed={seed}"), |_| {
                let target = noise_free_gram(&draw.spec, &draw.inputs)?;
                Ok(max_gram_deviation(&draw.y, &target, draw.spec.sigma, Normalization::ByP, false, false)?)
            })?;
            devs.push(dev.max_abs_deviation);

            let comps = ctx.stage(&format!("svd p={p} seed={seed}"), |_| top_components(&draw.y, 3, false))?;
            ens.push(comps.energy_ratio);

            let mut dgm = None;
            if cfg.homology {
                let (d, betti) = ctx.stage(&format!("rips p={p} seed={seed}"), |_| {
                    let idx = subsample(draw.y.nrows(), cfg.n_sub, seed);
                    let d = distance_matrix(&draw.y.select_rows(&idx), cfg.scaling)?;
                    let dgm = rips_persistence_with_budget(&d, cfg.max_dim, cfg.max_edge, cfg.simplex_budget)?;
                    let betti = betti_estimate(&dgm, cfg.ratio_threshold)?;
                    Ok((dgm, betti))
                })?;
                bs.push(betti.counts);
                dgm = Some(d);
            }
            if s == 0 {
                svd_file = Some(ctx.writer.write_matrix(&format!("toy_circle/svd_p{p}.csv"), &comps.scores)?);
                if let Some(dgm) = &dgm {
                    dgm_file = Some(ctx.writer.write(&format!("toy_circle/diagram_p{p}.csv"), dgm.to_csv().as_bytes())?);
                }
            }
        }
        per_p.push(json!({
            "p": p,
            "maxAbsDeviation": devs,
            "svdEnergyTop3": ens,
            "betti": bs,
            "svdCoordinates": svd_file,
            "diagram": dgm_file,
        }));
        deviations.push(devs);
        energies.push(ens);
        bettis.push(bs);
    }

    let (lo, hi) = extreme_indices(&cfg.p_values);
    let (p_lo, p_hi) = (cfg.p_values[lo], cfg.p_values[hi]);
    if lo != hi {
        let flags: Vec<bool> = deviations[hi].iter().zip(&deviations[lo]).map(|(a, b)| a < b).collect();
        let (k, frac) = tally(&flags);
        ctx.checks.push(Check::soft(
            "deviation_decreases_in_p",
            k == flags.len(),
            format!("deviation at p={p_hi} below p={p_lo} on {frac} seeds"),
        ));
    }
    let flags: Vec<bool> = energies[hi].iter().map(|&e| e >= 0.9).collect();
    let (k, frac) = tally(&flags);
    ctx.checks.push(Check::soft(
        "svd_energy_top3",
        k == flags.len(),
        format!("top-3 energy ≥ 0.9 at p={p_hi} on {frac} seeds"),
    ));
    if cfg.homology {
        let flags: Vec<bool> = bettis[hi].iter().map(|b| b[0] == 1 && b[1] == 1).collect();
        let (k, frac) = tally(&flags);
        ctx.checks.push(Check::hard(
            "betti_circle",
            10 * k >= 9 * flags.len(),
            format!("(H0, H1) = (1, 1) at p={p_hi} on {frac} seeds (≥ 90% required)"),
        ));
    }
    Ok(json!({ "perP": per_p }))
}

/// Positions of the smallest and largest entries.
pub(super) fn extreme_indices(values: &[usize]) -> (usize, usize) {
    let lo = (0..values.len()).min_by_key(|&i| values[i]).unwrap_or(0);
    let hi = (0..values.len()).max_by_key(|&i| values[i]).unwrap_or(0);
    (lo, hi)
}
