use super::ThpParams;
use crate::error::{domain, Result};
use crate::quad::gl20;
use crate::specfun::{lower_gamma_value, upper_gamma_value};

const LEVELS: usize = 40;

/// g_t(y) = ∫₀ᵗ (s−y)₊^{H−3/2} e^{−λ(s−y)₊} ds in incomplete-gamma form.
pub fn kernel_g(p: &ThpParams, t: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("kernel needs t > 0, got {t}")));
    }
    Ok(g(p.h - 0.5, p.lambda, t, y))
}

fn g(beta: f64, lambda: f64, t: f64, y: f64) -> f64 {
    if y >= t {
        return 0.0;
    }
    let scale = lambda.powf(-beta);
    if y >= 0.0 {
        return scale * lower_gamma_value(beta, lambda * (t - y));
    }
    let lo = -lambda * y;
    let hi = lambda * (t - y);
    if lo > beta + 1.0 {
        scale * (upper_gamma_value(beta, lo) - upper_gamma_value(beta, hi))
    } else {
        scale * (lower_gamma_value(beta, hi) - lower_gamma_value(beta, lo))
    }
}

fn dyadic(a: f64, b: f64, toward_a: bool, out: &mut Vec<(f64, f64)>) {
    let len = b - a;
    let mut w = 0.5 * len;
    let mut panels = Vec::new();
    let mut edge = if toward_a { a + w } else { b - w };
    panels.push(if toward_a { (edge, b) } else { (a, edge) });
    for _ in 0..LEVELS {
        w *= 0.5;
        let next = if toward_a { a + w } else { b - w };
        panels.push(if toward_a { (next, edge) } else { (edge, next) });
        edge = next;
    }
    panels.push(if toward_a { (a, edge) } else { (edge, b) });
    out.extend(panels);
}

/// R(t, s) = σ² ∫ g_t(y) g_s(y) dy.
///
/// Panels refine dyadically toward the kernel breakpoints y = 0 and
/// y = min(t, s); the left tail is cut at −40/λ with panels no wider than
/// min(1/λ, min(t, s)).
pub fn kernel_l2_covariance(p: &ThpParams, t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(domain(format!("times must be nonnegative, got ({t}, {s})")));
    }
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let beta = p.h - 0.5;
    let lam = p.lambda;
    let m = t.min(s);
    let f = |y: f64| g(beta, lam, t, y) * g(beta, lam, s, y);
    let mut panels = Vec::new();
    dyadic(0.0, 0.5 * m, true, &mut panels);
    dyadic(0.5 * m, m, false, &mut panels);
    let w = (1.0 / lam).min(m);
    dyadic(-w, 0.0, false, &mut panels);
    let end = -40.0 / lam;
    let mut a = -w;
    while a > end {
        let b = (a - w).max(end);
        panels.push((b, a));
        a = b;
    }
    let rule = gl20();
    let total: f64 = panels.iter().map(|&(a, b)| rule.integrate(a, b, f)).sum();
    Ok(p.sigma * p.sigma * total)
}
