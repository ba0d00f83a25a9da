use serde_json::{json, Value};

use super::Context;
use crate::geodesic::{smooth_path_lengths, superimpose_on_rhombus, GeodesicMatrix, GraphMetric, LatentMetric};
use crate::harness::common::{choose_sources, graph_geodesics, neighbor_count, regress_and_write, subsample};
use crate::harness::{load_matrix, top_components, HarnessError};
use crate::homology::{betti_estimate, distance_matrix, rips_persistence_with_budget, scale_rows, Scaling};
use crate::model::{DataMatrix, LatentSample, LatentSpace};

pub(super) fn run(ctx: &mut Context) -> Result<Value, HarnessError> {
    let cfg = ctx.cfg;
    let (y_path, xi_path) = match (&cfg.y_path, &cfg.xi_path) {
        (Some(y), Some(xi)) => (y, xi),
        _ => return Err(HarnessError::Config("external data needs y_path and xi_path".into())),
    };
    let (y, xi) = ctx.stage("load", |_| Ok((load_matrix(y_path, None)?, load_matrix(xi_path, Some(2))?)))?;
    if y.nrows() != xi.nrows() {
        return Err(HarnessError::Config(format!(
            "Y has {} rows but ξ has {}",
            y.nrows(),
            xi.nrows()
        )));
    }
    let (y, xi, kept) = match cfg.top_active {
        Some(m) if m < y.nrows() => {
            let idx = most_active(&y, m);
            (y.select_rows(&idx), xi.select_rows(&idx), Some(idx))
        }
        _ => (y, xi, None),
    };
    let n = y.nrows();
    if n < 2 {
        return Err(HarnessError::Config(format!("external data needs at least 2 rows, got {n}")));
    }
    ctx.seeds_used = vec![cfg.seed];
    ctx.units = vec![
        format!("Ly: k-NN graph geodesics of {:?}-scaled rows of Y", cfg.scaling),
        "Lz: k-NN graph geodesics of the positions ξ under each metric".into(),
        "top_active keeps the rows with the largest mean value, in file order".into(),
    ];
    let mut results = serde_json::Map::new();
    results.insert("rows".into(), json!(n));
    results.insert("columns".into(), json!(y.ncols()));
    if let Some(idx) = &kept {
        let list: String = idx.iter().map(|i| format!("{i}\n")).collect();
        let file = ctx.writer.write("external/kept_rows.csv", list.as_bytes())?;
        results.insert("keptRows".into(), json!(file));
    }

    let scaled = scale_rows(&y, cfg.scaling)?;
    if cfg.homology {
        let value = ctx.stage("homology", |ctx| {
            let reduced = match cfg.pca_dims {
                Some(d) => top_components(&scaled, d, true)?.scores,
                None => scaled.clone(),
            };
            let idx = subsample(n, cfg.n_sub, cfg.seed);
            let d = distance_matrix(&reduced.select_rows(&idx), Scaling::Raw)?;
            let dgm = rips_persistence_with_budget(&d, cfg.max_dim, cfg.max_edge, cfg.simplex_budget)?;
            let betti = betti_estimate(&dgm, cfg.ratio_threshold)?;
            let file = ctx.writer.write("external/diagram.csv", dgm.to_csv().as_bytes())?;
            Ok(json!({ "pcaDims": cfg.pca_dims, "subsample": idx.len(), "diagram": file, "betti": betti }))
        })?;
        results.insert("homology".into(), value);
    }

    let sources = choose_sources(n, cfg.max_pairs, cfg.seed);
    let k = neighbor_count(cfg);
    let (ly, k_y) = ctx.stage("observed geodesics", |_| {
        graph_geodesics(&scaled, &GraphMetric::AmbientEuclid, k, &sources)
    })?;
    results.insert("kObserved".into(), json!(k_y));
    results.insert("sources".into(), json!(ly.sources().len()));
    let ly: GeodesicMatrix = if cfg.smooth {
        let smoothed = ctx.stage("smoothing", |_| Ok(smooth_path_lengths(&ly, &xi, cfg.k_smooth)?))?;
        results.insert("uniformFallbacks".into(), json!(smoothed.uniform_fallbacks));
        smoothed.lengths
    } else {
        ly
    };

    let mut metrics: Vec<(String, LatentMetric, DataMatrix)> =
        vec![("open_field".into(), LatentMetric::OpenFieldEuclid, xi.clone())];
    if let (Some(r1), Some(r2)) = (cfg.r1, cfg.r2) {
        let on_rhombus = superimpose_on_rhombus(&xi, r1, r2)?;
        let angles = LatentSample::from_points(LatentSpace::FlatTorusRhombus { r1, r2 }, on_rhombus.clone())?.torus_angles()?;
        metrics.push(("rhombus_euclid".into(), LatentMetric::RhombusEuclid { r1, r2 }, on_rhombus.clone()));
        metrics.push(("rhombus_teleport".into(), LatentMetric::RhombusTeleport { r1, r2 }, on_rhombus));
        for &ratio in &cfg.torus_ratios {
            metrics.push((format!("torus_3d_R{ratio}"), LatentMetric::Torus3D { major: ratio, minor: 1.0 }, angles.clone()));
        }
    }
    let mut reports = serde_json::Map::new();
    for (name, metric, points) in &metrics {
        let (lz, k_z) = ctx.stage(&format!("{name} geodesics"), |_| {
            graph_geodesics(points, &GraphMetric::Latent { metric: *metric }, k, &sources)
        })?;
        let (report, path) = regress_and_write(&mut ctx.writer, &format!("external/moving_average_{name}.csv"), &lz, &ly)?;
        reports.insert(name.clone(), json!({ "k": k_z, "report": report, "movingAverage": path }));
    }
    results.insert("isometry".into(), Value::Object(reports));
    Ok(Value::Object(results))
}

/// Indices of the `m` rows with the largest mean, in increasing order;
/// ties go to the earlier row.
fn most_active(y: &DataMatrix, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.nrows()).collect();
    let activity: Vec<f64> = y.rows_iter().map(|r| r.iter().sum::<f64>()).collect();
    order.sort_by(|&a, &b| activity[b].total_cmp(&activity[a]).then(a.cmp(&b)));
    let mut idx = order[..m].to_vec();
    idx.sort_unstable();
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn most_active_keeps_file_order() {
        let y = DataMatrix::from_rows(&[[1.0, 0.0], [5.0, 1.0], [0.0, 0.0], [3.0, 3.0]]).unwrap();
        assert_eq!(most_active(&y, 2), vec![1, 3]);
        let tied = DataMatrix::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
        assert_eq!(most_active(&tied, 2), vec![0, 1]);
    }
}
