//! Small statistics helpers for the experiment checks.

use crate::specfun::normal_cdf;

/// Least-squares slope of y on x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Sample mean and unbiased variance.
pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Standard error of the sample variance, from the fourth central moment.
pub fn variance_standard_error(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (m, v) = mean_var(x);
    let m4 = x.iter().map(|a| (a - m).powi(4)).sum::<f64>() / n;
    ((m4 - v * v * (n - 3.0) / (n - 1.0)) / n).sqrt()
}

/// Sample covariance of paired draws and its standard error, from the
/// spread of the centred products.
pub fn covariance_with_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let mp = p.iter().sum::<f64>() / n;
    let vp = p.iter().map(|v| (v - mp) * (v - mp)).sum::<f64>() / (n - 1.0);
    (mp * n / (n - 1.0), (vp / n).sqrt())
}

/// Kolmogorov distribution survival function P(K > x).
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // Small-x form: P(K ≤ x) = √(2π)/x Σ e^{−(2k−1)²π²/(8x²)}.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        return 1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s;
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * kf * kf * x * x).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test against N(0, var): returns (D, asymptotic p-value).
pub fn ks_normal(sample: &[f64], var: f64) -> (f64, f64) {
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let n = x.len() as f64;
    let sd = var.sqrt();
    let mut d = 0.0f64;
    for (i, v) in x.iter().enumerate() {
        let f = normal_cdf(v / sd);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    (d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d))
}
