use super::ThpParams;
use crate::error::{domain, Result};
use crate::quad::gl20;
use serde::Serialize;
use std::f64::consts::PI;

/// J(κ) = ∫₀^∞ (1 − cos x) x^{−2} (κ² + x²)^{½−H} dx.
///
/// Geometric panels resolve the scale min(κ, 1) at the origin, π/2 panels
/// cover [·, X] with X a multiple of 2π, and the tail beyond X is summed
/// from the binomial expansion of (κ² + x²)^{½−H} with the oscillatory
/// moments expanded asymptotically.
pub fn structure_integral(kappa: f64, h: f64) -> f64 {
    let beta = h - 0.5;
    let k2 = kappa * kappa;
    let f = |x: f64| {
        let s = (0.5 * x).sin();
        2.0 * s * s / (x * x) * (k2 + x * x).powf(-beta)
    };
    let m = 200f64.max((20.0 * kappa / (2.0 * PI)).ceil());
    let big_x = 2.0 * PI * m;
    let rule = gl20();
    let mut acc = 0.0;
    let mut a = 0.0;
    let mut b = kappa.min(1.0) / 64.0;
    while a < big_x {
        let step = b - a;
        acc += rule.integrate(a, b, f);
        a = b;
        b = (a + step.max(a).min(0.5 * PI)).min(big_x);
        if b - a < 1e-300 {
            break;
        }
    }
    acc + tail(kappa, beta, big_x)
}

fn oscillatory_moment(p: f64, x: f64) -> f64 {
    // ∫_X^∞ cos(x) x^{−p} dx for cos X = 1.
    let mut term = p * x.powf(-p - 1.0);
    let mut s = term;
    for j in 0..30 {
        let jf = j as f64;
        term *= -(p + 2.0 * jf + 1.0) * (p + 2.0 * jf + 2.0) / (x * x);
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    s
}

fn tail(kappa: f64, beta: f64, x: f64) -> f64 {
    let mut coef = 1.0;
    let mut kp = 1.0;
    let mut s = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            coef *= (-beta - kf + 1.0) / kf;
            kp *= kappa * kappa;
        }
        let p = 2.0 + 2.0 * beta + 2.0 * kf;
        let term = coef * kp * (x.powf(1.0 - p) / (p - 1.0) - oscillatory_moment(p, x));
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    s
}

/// V(u) = 4σ²/C(H)² · u^{2H} J(λu).
pub fn spectral_variance(p: &ThpParams, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    4.0 * p.sigma * p.sigma * p.inv_c2() * u.powf(2.0 * p.h) * structure_integral(p.lambda * u, p.h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThnFlavor {
    /// The density of the increments viewed on all of ℝ.
    Continuous,
    /// The aliased density of the unit-step increment sequence on [−π, π].
    Discrete,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThnDensity {
    pub value: f64,
    /// Bound on the omitted aliases (0 for the continuous flavor).
    pub tail_bound: f64,
    pub terms: usize,
}

fn continuous(p: &ThpParams, w: f64) -> f64 {
    let sinc2 = if w == 0.0 {
        1.0
    } else {
        let s = (0.5 * w).sin() / (0.5 * w);
        s * s
    };
    p.sigma * p.sigma * p.inv_c2() * sinc2 * (p.lambda * p.lambda + w * w).powf(0.5 - p.h)
}

/// Spectral density of tempered Hermite noise Z(n+1) − Z(n).
///
/// The discrete flavor sums the aliases ℓ = −L … L of the continuous
/// density and reports the bound 2C₀(2πL − π)^{−2H}/(4πH), C₀ = 4σ²/C(H)²,
/// on the rest.
pub fn thn_spectral_density(p: &ThpParams, omega: f64, flavor: ThnFlavor, ell_max: usize) -> Result<ThnDensity> {
    match flavor {
        ThnFlavor::Continuous => Ok(ThnDensity { value: continuous(p, omega), tail_bound: 0.0, terms: 1 }),
        ThnFlavor::Discrete => {
            if ell_max < 1 {
                return Err(domain("the aliased density needs ell_max ≥ 1"));
            }
            if omega.abs() > PI {
                return Err(domain(format!("ω must lie in [−π, π], got {omega}")));
            }
            let mut s = continuous(p, omega);
            for l in 1..=ell_max {
                let lf = 2.0 * PI * l as f64;
                s += continuous(p, omega + lf) + continuous(p, omega - lf);
            }
            let c0 = 4.0 * p.sigma * p.sigma * p.inv_c2();
            let l = ell_max as f64;
            let tail = 2.0 * c0 * (2.0 * PI * l - PI).powf(-2.0 * p.h) / (4.0 * PI * p.h);
            Ok(ThnDensity { value: s, tail_bound: tail, terms: 2 * ell_max + 1 })
        }
    }
}

/// ∫_ℝ of the continuous increment density, by panels in ω with an
/// explicit |ω|^{−1−2H} tail; equals Var Z(1).
pub fn continuous_density_integral(p: &ThpParams) -> (f64, f64) {
    let rule = gl20();
    let mut br = vec![0.0];
    let mut x = p.lambda.min(1.0) / 64.0;
    while x < 2.0 {
        br.push(x);
        x *= 2.0;
    }
    let top = 2.0 * PI * 4000.0;
    let mut x = 2.0;
    while x < top {
        br.push(x);
        x += 0.5 * PI;
    }
    br.push(top);
    let body: f64 = br.windows(2).map(|w| rule.integrate(w[0], w[1], |o| continuous(p, o))).sum();
    // Beyond `top`: h ≤ C₀ ω^{−1−2H}(1 + …); bound and estimate via the mean of 4sin²(ω/2) = 2.
    let c = p.sigma * p.sigma * p.inv_c2();
    let est = c * 2.0 * top.powf(-2.0 * p.h) / (2.0 * p.h);
    let bound = 2.0 * est;
    (2.0 * (body + est), 2.0 * bound)
}
