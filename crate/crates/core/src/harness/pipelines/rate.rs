use serde_json::{json, Value};

use super::Context;
use crate::concentration::{rate_study, RateStudy, RateTemplate};
use crate::harness::common::seeds;
use crate::harness::{Check, HarnessError};
use crate::model::Family;

const SLOPE_RANGE: (f64, f64) = (0.85, 1.15);

pub(super) fn run(ctx: &mut Context) -> Result<Value, HarnessError> {
    let cfg = ctx.cfg;
    if cfg.p_values.len() < 4 {
        return Err(HarnessError::Config(format!(
            "the rate study needs at least 4 p values, got {}",
            cfg.p_values.len()
        )));
    }
    ctx.seeds_used = seeds(cfg);
    ctx.units = vec![
        "i.i.d. deviation: max |Y_i·Y_j/tr Σ − 1[i=j]|; toy circle: ByP deviation".into(),
        "slope: OLS of log(median deviation) on log √(log n / p_int)".into(),
    ];
    let p_grid: Vec<(usize, usize)> = cfg.p_values.iter().map(|&p| (cfg.n, p)).collect();
    let study = |ctx: &mut Context, name: &str, template: RateTemplate, grid: &[(usize, usize)]| {
        let s = ctx.stage(name, |_| Ok(rate_study(&template, grid, cfg.seeds, cfg.seed)?))?;
        let file = ctx.writer.write_json(&format!("rate/{name}.json"), &s)?;
        Ok::<(RateStudy, String), HarnessError>((s, file))
    };

    let (gauss, gauss_file) = study(ctx, "iid_gaussian", RateTemplate::Iid { family: Family::Gaussian }, &p_grid)?;
    let (rad, rad_file) = study(ctx, "iid_rademacher", RateTemplate::Iid { family: Family::Rademacher }, &p_grid)?;
    let toy_template = RateTemplate::ToyCircle {
        sigma: cfg.sigma_sq.sqrt(),
        coef_family: cfg.coef_family,
        noise_family: cfg.noise_family,
        exclude_diagonal: false,
    };
    let (toy, toy_file) = study(ctx, "toy_circle", toy_template, &p_grid)?;

    let in_range = |s: f64| (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&s);
    ctx.checks.push(Check::soft(
        "iid_gaussian_slope",
        in_range(gauss.fitted_slope),
        format!("slope {:.4} (expected in [{}, {}])", gauss.fitted_slope, SLOPE_RANGE.0, SLOPE_RANGE.1),
    ));
    ctx.checks.push(Check::soft(
        "rademacher_matches_gaussian",
        (rad.fitted_slope - gauss.fitted_slope).abs() <= 0.1,
        format!("Rademacher slope {:.4} vs Gaussian {:.4}", rad.fitted_slope, gauss.fitted_slope),
    ));
    let spread = |s: &RateStudy| {
        let r = s.rescaled_medians();
        r.iter().copied().fold(f64::NEG_INFINITY, f64::max) / r.iter().copied().fold(f64::INFINITY, f64::min)
    };
    ctx.checks.push(Check::soft(
        "p_sweep_rescaled_bounded",
        spread(&gauss) < 2.0,
        format!("rescaled medians vary by a factor {:.3} across p", spread(&gauss)),
    ));

    let mut sweep_json = Value::Null;
    if cfg.n_values.len() >= 2 {
        let grid: Vec<(usize, usize)> = cfg.n_values.iter().map(|&n| (n, cfg.sweep_p)).collect();
        let (sweep, sweep_file) = study(ctx, "iid_gaussian_n_sweep", RateTemplate::Iid { family: Family::Gaussian }, &grid)?;
        ctx.checks.push(Check::soft(
            "n_sweep_rescaled_bounded",
            spread(&sweep) < 2.0,
            format!("rescaled medians vary by a factor {:.3} across n", spread(&sweep)),
        ));
        sweep_json = json!({ "file": sweep_file, "fittedSlope": sweep.fitted_slope, "rescaledMedians": sweep.rescaled_medians() });
    }

    let summary = |s: &RateStudy, file: String| {
        json!({ "file": file, "fittedSlope": s.fitted_slope, "medians": s.medians, "rescaledMedians": s.rescaled_medians() })
    };
    Ok(json!({
        "iidGaussian": summary(&gauss, gauss_file),
        "iidRademacher": summary(&rad, rad_file),
        "toyCircle": summary(&toy, toy_file),
        "nSweep": sweep_json,
    }))
}
