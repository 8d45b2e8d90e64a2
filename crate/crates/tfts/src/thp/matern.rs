use super::bessel_route::calibrated_prefactor;
use super::{thp_covariance, CovMethod, ThpParams};
use crate::error::{domain, Result};
use crate::linalg::{Cholesky, SymMatrix};
use crate::report::ExperimentReport;
use crate::rng::PhiloxStream;
use crate::specfun::{bessel_k_value, gamma};

/// Stationary covariance ρ_M(u) = σ² A u^{H−1} K_{H−1}(λu) of the Matérn
/// process whose integral is Z (H > 1).
pub fn matern_covariance(p: &ThpParams, u: f64) -> Result<f64> {
    if !(p.h > 1.0) {
        return Err(domain(format!("the Matérn decomposition needs H > 1, got {}", p.h)));
    }
    let a = p.sigma * p.sigma * calibrated_prefactor(p.h, p.lambda);
    let u = u.abs();
    if u == 0.0 {
        return Ok(a * 2f64.powf(p.h - 2.0) * gamma(p.h - 1.0) * p.lambda.powf(1.0 - p.h));
    }
    Ok(a * u.powf(p.h - 1.0) * bessel_k_value(p.h - 1.0, p.lambda * u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternMode {
    /// Double trapezoidal integration of ρ_M.
    Deterministic,
    /// A synthesized Matérn path integrated pathwise.
    Stochastic { seed: u64 },
}

fn ou_covariance(p: &ThpParams, t: f64, s: f64) -> f64 {
    let v = |u: f64| p.sigma * p.sigma * (u / (p.lambda * p.lambda) + (-p.lambda * u).exp_m1() / p.lambda.powi(3));
    0.5 * (v(t) + v(s) - v((t - s).abs()))
}

/// Checks that Z is the time integral of the Matérn process M for H > 1.
///
/// Deterministic mode compares ∫₀ᵗ∫₀ˢ ρ_M(u−v) du dv (trapezoid, step `step`)
/// with R(t, s) at relative `tol` and, for H = 3/2, with the Ornstein–Uhlenbeck closed
/// form at step² relative. Stochastic mode integrates one synthesized M path
/// over [0, max t] and reports its total variation at steps `step`, 2·`step`,
/// 4·`step`, which must agree to `tol`.
pub fn matern_decomposition_check(p: &ThpParams, pairs: &[(f64, f64)], step: f64, mode: MaternMode, tol: f64) -> Result<ExperimentReport> {
    if !(p.h > 1.0) {
        return Err(domain(format!("the Matérn decomposition needs H > 1, got {}", p.h)));
    }
    let mut rep = ExperimentReport::new("thp Matérn decomposition").param("H", p.h).param("lambda", p.lambda).param("step", step);
    let t_max = pairs.iter().map(|&(t, s)| t.max(s)).fold(0.0, f64::max);
    let n = (t_max / step).round() as usize;
    let rho: Vec<f64> = (0..=n).map(|d| matern_covariance(p, d as f64 * step)).collect::<Result<_>>()?;
    match mode {
        MaternMode::Deterministic => {
            for &(t, s) in pairs {
                let (nt, ns) = ((t / step).round() as usize, (s / step).round() as usize);
                let w = |i: usize, n: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
                let mut acc = 0.0;
                for i in 0..=nt {
                    let mut row = 0.0;
                    for j in 0..=ns {
                        row += w(j, ns) * rho[i.abs_diff(j)];
                    }
                    acc += w(i, nt) * row;
                }
                let integral = acc * step * step;
                let r = thp_covariance(p, t, s, CovMethod::Spectral)?;
                rep.relative(format!("∫∫ρ_M vs R({t}, {s})"), integral, r, tol);
                if (p.h - 1.5).abs() < 1e-15 {
                    rep.relative(format!("∫∫ρ_M vs OU closed form ({t}, {s})"), integral, ou_covariance(p, t, s), step * step);
                }
            }
        }
        MaternMode::Stochastic { seed } => {
            rep.seed = Some(seed);
            let cov = Cholesky::new(&SymMatrix::toeplitz(&rho))?;
            let mut z = vec![0.0; n + 1];
            PhiloxStream::new(seed, 0).fill_normal(&mut z);
            let m = cov.mul_lower(&z);
            let mut path = vec![0.0; n + 1];
            for i in 1..=n {
                path[i] = path[i - 1] + 0.5 * step * (m[i - 1] + m[i]);
            }
            let tv = |stride: usize| path.iter().step_by(stride).collect::<Vec<_>>().windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
            let fine = tv(1);
            rep.check(format!("total variation is finite ({fine:.6})"), fine.is_finite());
            for stride in [2usize, 4] {
                rep.relative(format!("total variation at step ×{stride}"), tv(stride), fine, tol);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ou_matern_covariance() {
        let p = ThpParams::new(1.5, 0.8, 1.2).unwrap();
        for u in [0.0f64, 0.3, 2.0] {
            let exact = 1.44 * (-0.8 * u).exp() / 1.6;
            assert!((matern_covariance(&p, u).unwrap() / exact - 1.0).abs() < 1e-10);
        }
        let q = ThpParams::new(1.7, 0.8, 1.0).unwrap();
        let r0 = gamma(1.4) / 1.6f64.powf(1.4);
        assert!((matern_covariance(&q, 0.0).unwrap() / r0 - 1.0).abs() < 1e-10);
        assert!((matern_covariance(&q, 1e-9).unwrap() / r0 - 1.0).abs() < 1e-6);
        assert!(matern_covariance(&ThpParams::new(0.9, 1.0, 1.0).unwrap(), 0.5).is_err());
    }
}
