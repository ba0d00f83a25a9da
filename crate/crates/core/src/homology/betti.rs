//! Betti numbers read off a persistence diagram by a persistence-gap rule.

use serde::{Deserialize, Serialize};

use super::{HomologyError, PersistenceDiagram};

/// Default ratio a gap must reach to separate features from noise.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 2.0;

/// Ratios kept per dimension in [`BettiEstimate::persistence_ratios`].
const RATIOS_KEPT: usize = 8;

/// Estimated `(H0, H1, H2)` together with the rule that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BettiEstimate {
    pub counts: [usize; 3],
    pub rule: String,
    pub ratio_threshold: f64,
    /// Leading consecutive ratios `pers_k / pers_{k+1}` per dimension.
    pub persistence_ratios: [Vec<f64>; 3],
}

/// Applies the gap rule in every dimension of `dgm`.
///
/// Finite persistences are sorted descending, `pers_1 ≥ … ≥ pers_m`. The
/// count is the first index `k` with `pers_k ≥ t · pers_{k+1}`, provided
/// `pers_k ≥ pers_1 / t`; a gap below the dominant cluster means the
/// dimension holds only noise and counts 0. In dimensions ≥ 1 a
/// machine-epsilon guard is appended as `pers_{m+1}`, so a lone cluster
/// counts. In dimension 0 it is not: merges that all happen at one scale
/// describe a single cluster, which the essential class already counts.
/// Infinite-death classes are always counted.
pub fn betti_estimate(dgm: &PersistenceDiagram, ratio_threshold: f64) -> Result<BettiEstimate, HomologyError> {
    if !(ratio_threshold > 1.0) || !ratio_threshold.is_finite() {
        return Err(HomologyError::InvalidArgument(format!(
            "ratio threshold must exceed 1, got {ratio_threshold}"
        )));
    }
    let mut counts = [0usize; 3];
    let mut ratios: [Vec<f64>; 3] = Default::default();
    for dim in 0..=dgm.max_dim.min(2) {
        let pers = dgm.finite_persistences(dim);
        let essential = dgm.in_dim(dim).filter(|p| p.is_essential()).count();
        counts[dim] = essential + gap_count(&pers, ratio_threshold, dim > 0);
        ratios[dim] = pers.windows(2).take(RATIOS_KEPT).map(|w| w[0] / w[1]).collect();
    }
    Ok(BettiEstimate {
        counts,
        rule: format!(
            "first k with pers_k >= {ratio_threshold} * pers_(k+1) among finite persistences sorted descending \
             (epsilon guard after the last in dimensions >= 1), counted only if pers_k >= pers_1 / {ratio_threshold}; \
             infinite-death classes always counted"
        ),
        ratio_threshold,
        persistence_ratios: ratios,
    })
}

/// Number of features above the first significant gap of a descending list.
fn gap_count(pers: &[f64], t: f64, guard: bool) -> usize {
    let Some(&top) = pers.first() else {
        return 0;
    };
    for (k, &p) in pers.iter().enumerate() {
        if p < top / t {
            return 0;
        }
        let next = match pers.get(k + 1) {
            Some(&next) => next,
            None if guard => f64::EPSILON,
            None => return 0,
        };
        if p >= t * next {
            return k + 1;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::PersistencePair;

    fn dgm(dim: usize, pers: &[f64], essential: usize) -> PersistenceDiagram {
        let mut pairs: Vec<_> = pers.iter().map(|&p| PersistencePair { dim, birth: 0.5, death: 0.5 + p }).collect();
        pairs.extend((0..essential).map(|_| PersistencePair { dim: 0, birth: 0.0, death: f64::INFINITY }));
        PersistenceDiagram::new(pairs, 2, 10.0)
    }

    #[test]
    fn examples() {
        assert_eq!(gap_count(&[], 3.0, true), 0);
        assert_eq!(gap_count(&[10.0, 9.0, 0.1], 3.0, true), 2);
        assert_eq!(gap_count(&[10.0], 3.0, true), 1);
        assert_eq!(gap_count(&[10.0], 3.0, false), 0);
        assert_eq!(gap_count(&[0.923, 0.011, 0.01], 2.0, true), 1);
        // Smooth noise, then a tail gap well below the top: nothing counted.
        assert_eq!(gap_count(&[0.44, 0.43, 0.35, 0.3, 0.2, 0.01], 2.0, true), 0);
        // One tight cluster of merges is a single component.
        assert_eq!(gap_count(&[0.23, 0.22, 0.21, 0.2, 0.19], 2.0, false), 0);
        assert_eq!(gap_count(&[5.0, 0.23, 0.22, 0.21], 2.0, false), 1);
    }

    #[test]
    fn counts_essential_classes() {
        let e = betti_estimate(&dgm(1, &[0.9, 0.87, 0.32, 0.31], 1), 2.0).unwrap();
        assert_eq!(e.counts, [1, 2, 0]);
        assert_eq!(e.persistence_ratios[1].len(), 3);
        assert!(e.rule.contains("pers_k"));
        assert!(betti_estimate(&dgm(1, &[], 1), 1.0).is_err());
        let clustered = betti_estimate(&dgm(0, &[0.23, 0.22, 0.2], 1), 2.0).unwrap();
        assert_eq!(clustered.counts[0], 1);
    }
}
