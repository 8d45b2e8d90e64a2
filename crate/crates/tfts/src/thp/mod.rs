//! Tempered Hermite process of order one,
//!
//! Z(t) = ∫ g_t(y) B(dy),   g_t(y) = ∫₀ᵗ (s−y)₊^{H−3/2} e^{−λ(s−y)₊} ds,
//!
//! with B a Gaussian random measure of control σ² dy. Every covariance here
//! is R(t, s) = ½(V(t) + V(s) − V(|t−s|)) for the variance function
//! V(u) = Var Z(u), which three independent routes provide:
//!
//! * `Spectral`: V(u) = 4σ²/C(H)² · u^{2H} J(λu), with 1/C(H)² = Γ(H−½)²/(2π)
//!   and J(κ) = ∫₀^∞ (1−cos x) x^{−2} (κ² + x²)^{½−H} dx;
//! * `Bessel`: V(u) = 2σ² A Φ(u), Φ(u) = ∫₀ᵘ (u−d) d^{H−1} K_{1−H}(λd) dd,
//!   with A = C★★ · 2Γ(H−½)/(√π (2λ)^{H−1}) and C★★ calibrated against `Spectral`;
//! * `KernelL2`: R(t, s) = σ² ∫ g_t g_s dy directly.

mod bessel_route;
mod kernel;
mod matern;
mod spectral;
mod synth;

pub use bessel_route::{bessel_calibration_constant, bessel_variance};
pub use kernel::{kernel_g, kernel_l2_covariance};
pub use matern::{matern_covariance, matern_decomposition_check, MaternMode};
pub use spectral::{continuous_density_integral, spectral_variance, structure_integral, thn_spectral_density, ThnDensity, ThnFlavor};
pub use synth::{path_from, synthesize_path, CovarianceMatrix};

use crate::error::{domain, Result};
use crate::report::ExperimentReport;
use crate::specfun::gamma;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThpParams {
    pub h: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl ThpParams {
    pub fn new(h: f64, lambda: f64, sigma: f64) -> Result<Self> {
        if !(h > 0.5 && h.is_finite()) {
            return Err(domain(format!("H must exceed 1/2, got {h}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain(format!("λ must be positive, got {lambda}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain(format!("σ must be positive, got {sigma}")));
        }
        Ok(ThpParams { h, lambda, sigma })
    }

    /// 1/C(H)² = Γ(H−½)²/(2π).
    pub fn inv_c2(&self) -> f64 {
        let g = gamma(self.h - 0.5);
        g * g / (2.0 * PI)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        ThpParams { lambda, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CovMethod {
    Bessel,
    KernelL2,
    Spectral,
}

/// Var Z(u) for u ≥ 0.
pub fn variance(p: &ThpParams, u: f64, method: CovMethod) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(domain(format!("time must be nonnegative, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    match method {
        CovMethod::Spectral => Ok(spectral_variance(p, u)),
        CovMethod::Bessel => Ok(bessel_variance(p, u)),
        CovMethod::KernelL2 => kernel_l2_covariance(p, u, u),
    }
}

/// R(t, s) = E Z(t) Z(s) for t, s ≥ 0.
pub fn thp_covariance(p: &ThpParams, t: f64, s: f64, method: CovMethod) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(domain(format!("times must be nonnegative, got ({t}, {s})")));
    }
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    if method == CovMethod::KernelL2 {
        return kernel_l2_covariance(p, t, s);
    }
    let v = |u| variance(p, u, method);
    Ok(0.5 * (v(t)? + v(s)? - v((t - s).abs())?))
}

/// Checks R_{H,λ}(ct, cs) = c^{2H} R_{H,cλ}(t, s) and increment stationarity.
pub fn scaling_check(p: &ThpParams, c: f64, pairs: &[(f64, f64)], method: CovMethod) -> Result<ExperimentReport> {
    if !(c > 0.0) {
        return Err(domain(format!("scale must be positive, got {c}")));
    }
    let mut rep = ExperimentReport::new("thp scaling law").param("H", p.h).param("lambda", p.lambda).param("c", c);
    let q = p.with_lambda(c * p.lambda);
    for &(t, s) in pairs {
        let lhs = thp_covariance(p, c * t, c * s, method)?;
        let rhs = c.powf(2.0 * p.h) * thp_covariance(&q, t, s, method)?;
        rep.relative(format!("R({}, {})", c * t, c * s), lhs, rhs, 1e-8);
    }
    Ok(rep)
}

/// Var(Z(t+h) − Z(t)) for several t must not depend on t.
pub fn increment_stationarity_check(p: &ThpParams, h: f64, starts: &[f64], method: CovMethod) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("thp stationary increments").param("H", p.h).param("lambda", p.lambda).param("h", h);
    let base = variance(p, h, method)?;
    for &t in starts {
        let v = thp_covariance(p, t + h, t + h, method)? - 2.0 * thp_covariance(p, t + h, t, method)? + thp_covariance(p, t, t, method)?;
        rep.push(format!("t = {t}"), v, base, (v - base).abs() / base.max(variance(p, t + h, method)?), 1e-8);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ou_variance_closed_form() {
        // H = 3/2: V(t) = σ²[t/λ² − (1 − e^{−λt})/λ³].
        let p = ThpParams::new(1.5, 0.7, 1.3).unwrap();
        for t in [0.1, 1.0, 4.0] {
            let exact = 1.69 * (t / 0.49 - (1.0 - (-0.7f64 * t).exp()) / 0.343);
            for m in [CovMethod::Spectral, CovMethod::Bessel, CovMethod::KernelL2] {
                let v = variance(&p, t, m).unwrap();
                assert!((v / exact - 1.0).abs() < 1e-9, "{m:?} t={t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn covariance_edge_cases() {
        let p = ThpParams::new(0.8, 1.0, 1.0).unwrap();
        for m in [CovMethod::Spectral, CovMethod::Bessel, CovMethod::KernelL2] {
            assert_eq!(thp_covariance(&p, 1.3, 0.0, m).unwrap(), 0.0);
            let a = thp_covariance(&p, 1.3, 0.4, m).unwrap();
            let b = thp_covariance(&p, 0.4, 1.3, m).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
        assert!(ThpParams::new(0.5, 1.0, 1.0).is_err());
        assert!(thp_covariance(&p, -1.0, 1.0, CovMethod::Spectral).is_err());
    }

    #[test]
    fn identity_scale_is_exact() {
        let p = ThpParams::new(0.7, 0.5, 1.0).unwrap();
        let rep = scaling_check(&p, 1.0, &[(1.0, 1.0), (2.0, 0.5)], CovMethod::Spectral).unwrap();
        assert_eq!(rep.max_error(), 0.0);
    }
}
