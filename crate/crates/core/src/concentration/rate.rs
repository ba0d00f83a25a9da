use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ambient_intrinsic_dim, max_gram_deviation, ConcentrationError, Normalization};
use crate::model::{
    dot, make_feature_map, noise_free_gram, sample_data, sample_latent, DataMatrix, Family, FeatureMapRequest,
    LatentSpace, ModelSpec, SamplingScheme,
};
use crate::stats::{fit_line, median};

/// Data-generating template instantiated once per `(n, p)` cell and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RateTemplate {
    /// `Y_i` i.i.d. with independent unit-variance entries, `Σ = I_p`.
    /// Deviation: `max_{i,j} |Y_i·Y_j / tr Σ − 1[i=j]|`.
    #[serde(rename_all = "camelCase")]
    Iid { family: Family },
    /// Circle-example random function model on an `n`-point grid;
    /// deviation in the `ByP` normalisation.
    #[serde(rename_all = "camelCase")]
    ToyCircle {
        sigma: f64,
        coef_family: Family,
        noise_family: Family,
        exclude_diagonal: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateCell {
    pub n: usize,
    pub p: usize,
    pub p_int: f64,
}

impl RateCell {
    /// `√(log n / p_int)`, the predicted scale of the maximum deviation.
    pub fn predicted_scale(&self) -> f64 {
        ((self.n as f64).ln() / self.p_int).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateStudy {
    pub template: RateTemplate,
    pub grid: Vec<RateCell>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Per cell, the maximum deviation for each seed.
    pub deviations: Vec<Vec<f64>>,
    pub medians: Vec<f64>,
    /// OLS fit of `log(median)` on `log √(log n / p_int)`.
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
}

impl RateStudy {
    /// Medians multiplied by `√(p_int / log n)`; bounded if the rate holds.
    pub fn rescaled_medians(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.medians)
            .map(|(c, m)| m / c.predicted_scale())
            .collect()
    }
}

/// Runs `seeds` replicates of `template` in every grid cell, records the
/// median maximum deviation per cell, and fits the log-log slope against
/// `√(log n / p_int)`.
///
/// Replicate `s` uses seed `base_seed + s` in every cell.
pub fn rate_study(
    template: &RateTemplate,
    grid: &[(usize, usize)],
    seeds: usize,
    base_seed: u64,
) -> Result<RateStudy, ConcentrationError> {
    if seeds < 3 {
        return Err(ConcentrationError::InvalidArgument(format!("rate study needs ≥ 3 seeds, got {seeds}")));
    }
    if grid.len() < 2 {
        return Err(ConcentrationError::DegenerateGrid(format!(
            "{} cell(s); a slope needs at least two",
            grid.len()
        )));
    }
    if let Some(&(n, p)) = grid.iter().find(|&&(n, p)| n < 2 || p == 0) {
        return Err(ConcentrationError::InvalidArgument(format!("cell (n={n}, p={p}) needs n ≥ 2, p ≥ 1")));
    }
    let cells: Vec<RateCell> = grid
        .iter()
        .map(|&(n, p)| {
            Ok(RateCell {
                n,
                p,
                p_int: ambient_intrinsic_dim(&vec![1.0; p])?,
            })
        })
        .collect::<Result<_, ConcentrationError>>()?;
    let xs: Vec<f64> = cells.iter().map(|c| c.predicted_scale().ln()).collect();
    if xs.iter().all(|x| *x == xs[0]) {
        return Err(ConcentrationError::DegenerateGrid("all cells share the same √(log n / p_int)".into()));
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..seeds).map(move |s| (c, s))).collect();
    let results: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, s)| replicate(template, &cells[c], base_seed.wrapping_add(s as u64)))
        .collect::<Result<_, _>>()?;
    let deviations: Vec<Vec<f64>> = results.chunks(seeds).map(|c| c.to_vec()).collect();
    let medians: Vec<f64> = deviations
        .iter()
        .map(|d| median(d).expect("non-empty, finite deviations"))
        .collect();
    if let Some(i) = medians.iter().position(|m| !(*m > 0.0)) {
        return Err(ConcentrationError::DegenerateGrid(format!("cell {i} has zero median deviation")));
    }
    let ys: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| ConcentrationError::DegenerateGrid("slope undefined".into()))?;
    Ok(RateStudy {
        template: template.clone(),
        grid: cells,
        seeds,
        base_seed,
        deviations,
        medians,
        fitted_slope: fit.slope,
        fitted_intercept: fit.intercept,
    })
}

fn replicate(template: &RateTemplate, cell: &RateCell, seed: u64) -> Result<f64, ConcentrationError> {
    match template {
        RateTemplate::Iid { family } => {
            let y = iid_matrix(cell.n, cell.p, *family, seed);
            let trace = cell.p as f64;
            let mut max = 0.0f64;
            for i in 0..cell.n {
                for j in 0..=i {
                    let target = if i == j { 1.0 } else { 0.0 };
                    max = max.max((dot(y.row(i), y.row(j)) / trace - target).abs());
                }
            }
            Ok(max)
        }
        RateTemplate::ToyCircle {
            sigma,
            coef_family,
            noise_family,
            exclude_diagonal,
        } => {
            let fm = make_feature_map(FeatureMapRequest::ToyCircle { p: cell.p })?;
            let mut spec = ModelSpec::new(fm, *sigma, seed);
            spec.coef_family = *coef_family;
            spec.noise_family = *noise_family;
            let latent = sample_latent(&LatentSpace::Circle { radius: 1.0 }, cell.n, SamplingScheme::UniformGrid, seed)?;
            let y = sample_data(&spec, &latent)?;
            let target = noise_free_gram(&spec, &latent)?;
            Ok(max_gram_deviation(&y, &target, *sigma, Normalization::ByP, *exclude_diagonal, false)?.max_abs_deviation)
        }
    }
}

/// `n × p` matrix of i.i.d. draws; row `i` uses stream `i` of a ChaCha
/// generator keyed by `seed`.
pub(crate) fn iid_matrix(n: usize, p: usize, family: Family, seed: u64) -> DataMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            (0..p).map(|_| family.draw(&mut rng)).collect()
        })
        .collect();
    DataMatrix::from_rows(&rows).expect("finite draws")
}
