use super::ConcentrationError;

/// Ambient intrinsic dimension `tr(Σ)/‖Σ‖` from the eigenvalues of `Σ`.
pub fn ambient_intrinsic_dim(spectrum: &[f64]) -> Result<f64, ConcentrationError> {
    if let Some(bad) = spectrum.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(ConcentrationError::InvalidArgument(format!(
            "spectrum entries must be finite and ≥ 0, found {bad}"
        )));
    }
    let max = spectrum.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(ConcentrationError::InvalidArgument(
            "spectrum needs at least one positive eigenvalue".into(),
        ));
    }
    Ok(spectrum.iter().sum::<f64>() / max)
}

/// Generalised Hanson-Wright tail bound
/// `2·exp(−c·min{t²/(K⁴‖A‖_F²), t/(K²‖A‖)})`.
///
/// The absolute constant `c` is not known; callers choose it (1 is the
/// conventional placeholder), so only the shape of the bound is meaningful.
pub fn ghw_tail_bound(frob_norm: f64, spec_norm: f64, k: f64, t: f64, c: f64) -> Result<f64, ConcentrationError> {
    for (name, v) in [("frobenius norm", frob_norm), ("spectral norm", spec_norm), ("K", k), ("c", c)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ConcentrationError::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    if !(t >= 0.0) || t.is_nan() {
        return Err(ConcentrationError::InvalidArgument(format!("t must be ≥ 0, got {t}")));
    }
    let k2 = k * k;
    let quadratic = t * t / (k2 * k2 * frob_norm * frob_norm);
    let linear = t / (k2 * spec_norm);
    Ok(2.0 * (-c * quadratic.min(linear)).exp())
}
