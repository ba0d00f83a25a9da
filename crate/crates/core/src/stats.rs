//! Small numerical helpers shared by the rate studies and the isometry
//! regression.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Result of an ordinary least-squares line fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of the fitted pairs.
    pub rho: f64,
}

/// Fits a line through `(x, y)` with an intercept. Returns `None` when `x`
/// has zero variance or fewer than two pairs are given.
///
/// Centered second moments are accumulated with compensated summation so the
/// fit stays accurate at millions of pairs.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len(), "fit_line: length mismatch");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mean_x = compensated_sum(x.iter().copied()) / n as f64;
    let mean_y = compensated_sum(y.iter().copied()) / n as f64;
    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let (sxx, syy, sxy) = (sxx.value(), syy.value(), sxy.value());
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rho = if syy > 0.0 {
        (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
    } else {
        // A constant response is perfectly explained by the fitted line.
        1.0
    };
    Some(LineFit {
        slope,
        intercept,
        rho,
    })
}

/// Median of a sample; the mean of the two middle order statistics for even
/// lengths. `None` for an empty slice or when NaN is present.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    })
}

/// Sample mean and (n-1)-normalised standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// One-sided sign-test p-value: `P(X ≥ k)` for `X ~ Binomial(n, 1/2)`.
pub fn sign_test_p(k: usize, n: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    // ln C(n, j) built up incrementally to avoid overflow.
    let mut ln_c = 0.0;
    let mut tail = 0.0;
    for j in 0..=n {
        if j > 0 {
            ln_c += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        if j >= k {
            tail += (ln_c - n as f64 * std::f64::consts::LN_2).exp();
        }
    }
    tail.min(1.0)
}
