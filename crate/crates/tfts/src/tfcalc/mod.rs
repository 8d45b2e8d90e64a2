//! Tempered fractional calculus on uniform grids.
//!
//! Fourier convention: F[f](ω) = (2π)^{−1/2} ∫ e^{−iωx} f(x) dx. Under it
//!
//! | operator | acts on | symbol |
//! |---|---|---|
//! | 𝕀₊^{α,λ} | f on (−∞, x] | (λ + iω)^{−α} |
//! | 𝕀₋^{α,λ} | f on [x, ∞) | (λ − iω)^{−α} |
//! | 𝔻₊^{α,λ} | f on (−∞, x] | (λ + iω)^{α} |
//! | 𝔻₋^{α,λ} | f on [x, ∞) | (λ − iω)^{α} |
//!
//! Samples outside the grid are treated as zero by every backend.

mod quadrature;
mod spectral;
mod weights;

pub use quadrature::{marchaud_derivative, quadrature_integral};
pub use spectral::{spectral_apply, SpectralBoundary};
pub use weights::{apply_weights, frac_weights, tempered_difference, tempered_summation, FracWeights, History, WeightKind};

use crate::error::{domain, Result};
use crate::grid::GridFunction;
use num_complex::Complex64;
use serde::Serialize;

/// Direction of the operator: `Plus` looks into the past, `Minus` into the future.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegralBackend {
    Spectral,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeBackend {
    Spectral,
    Marchaud,
}

/// Operator output plus the measured boundary leak of the input.
#[derive(Debug, Clone)]
pub struct OpOutput {
    pub values: GridFunction,
    /// Largest endpoint magnitude of the input relative to its peak.
    pub boundary_leak: f64,
}

impl OpOutput {
    pub fn warning(&self) -> Option<String> {
        (self.boundary_leak > 1e-12).then(|| format!("input does not vanish at the grid ends (relative leak {:.3e})", self.boundary_leak))
    }
}

/// Fourier symbol (λ ± iω)^p; p = −α for integrals and p = α for derivatives.
pub fn symbol(power: f64, lambda: f64, sign: Sign, omega: f64) -> Complex64 {
    Complex64::new(lambda, sign.factor() * omega).powf(power)
}

fn check(alpha: f64, lambda: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("α must be positive, got {alpha}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("λ must be positive, got {lambda}")));
    }
    Ok(())
}

/// Tempered fractional integral 𝕀±^{α,λ} f.
pub fn tempered_frac_integral(f: &GridFunction, alpha: f64, lambda: f64, sign: Sign, backend: IntegralBackend) -> Result<OpOutput> {
    check(alpha, lambda)?;
    let values = match backend {
        IntegralBackend::Spectral => spectral_apply(f, |w| symbol(-alpha, lambda, sign, w), lambda, SpectralBoundary::ZeroPadded)?,
        IntegralBackend::Quadrature => quadrature_integral(f, alpha, lambda, sign)?,
    };
    Ok(OpOutput { values, boundary_leak: f.boundary_leak() })
}

/// Tempered fractional derivative 𝔻±^{α,λ} f.
pub fn tempered_frac_derivative(f: &GridFunction, alpha: f64, lambda: f64, sign: Sign, backend: DerivativeBackend) -> Result<OpOutput> {
    check(alpha, lambda)?;
    let values = match backend {
        DerivativeBackend::Spectral => spectral_apply(f, |w| symbol(alpha, lambda, sign, w), lambda, SpectralBoundary::ZeroPadded)?,
        DerivativeBackend::Marchaud => marchaud_derivative(f, alpha, lambda, sign)?,
    };
    Ok(OpOutput { values, boundary_leak: f.boundary_leak() })
}
