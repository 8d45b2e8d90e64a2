//! 𝒜₂ distances between a smooth function and step functions on a lattice.
//!
//! For f_n = Σ_j c_j 1_{[s+jδ, s+(j+1)δ)} the transform factors as
//! f̂_n(ω) = (2π)^{−1/2} e^{−iωs} Ĉ(ωδ) δ e^{−iωδ/2} sinc(ωδ/2) with Ĉ
//! 2π-periodic, so the slowly decaying high-frequency part of ‖f − f_n‖²
//! reduces to alias sums Σ_m (λ² + ω_m²)^{½−H}/ω_m² per residue. The
//! difference is never formed from separately computed norms.

use super::{sinc, Estimate, TestFunction};
use crate::error::{domain, invalid, Result};
use crate::fft;
use crate::grid::GridFunction;
use crate::specfun::gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Step heights `coeffs[j]` on the cells [start + jδ, start + (j+1)δ).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSteps {
    pub start: f64,
    pub delta: f64,
    pub coeffs: Vec<f64>,
}

impl LatticeSteps {
    /// Left-endpoint samples f(start + jδ), j < count.
    pub fn sample(f: &TestFunction, start: f64, delta: f64, count: usize) -> Self {
        LatticeSteps { start, delta, coeffs: (0..count).map(|j| f.eval(start + j as f64 * delta)).collect() }
    }

    pub fn to_test_function(&self) -> Result<TestFunction> {
        TestFunction::elementary(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, &a)| super::Step { a, lo: self.start + j as f64 * self.delta, hi: self.start + (j + 1) as f64 * self.delta })
                .collect(),
        )
    }
}

const EXPLICIT_ALIASES: usize = 32;

/// Σ_{j≥0} g(ω₀ + jΔ) for g(ω) = (λ² + ω²)^{½−H}/ω², with the terms past
/// `EXPLICIT_ALIASES` replaced by the midpoint integral of ω^{−1−2H}.
fn alias_sum(omega0: f64, spacing: f64, h: f64, lambda: f64) -> (f64, f64) {
    let l2 = lambda * lambda;
    let mut s = 0.0;
    for j in 0..EXPLICIT_ALIASES {
        let w = omega0 + j as f64 * spacing;
        s += (l2 + w * w).powf(0.5 - h) / (w * w);
    }
    let w_star = omega0 + (EXPLICIT_ALIASES as f64 - 0.5) * spacing;
    let tail = w_star.powf(-2.0 * h) / (2.0 * h * spacing);
    (s + tail, tail)
}

/// ‖f − f_n‖_{𝒜₂} for a grid function `f` (or ‖f_n‖ when `f` is `None`)
/// and lattice steps f_n. The frame reaches 40/λ past the joint support.
pub fn lattice_step_distance(f: Option<&GridFunction>, steps: &LatticeSteps, h: f64, lambda: f64) -> Result<Estimate> {
    if !(h > 0.5) || !(lambda > 0.0) {
        return Err(domain(format!("need H > 1/2 and λ > 0, got H = {h}, λ = {lambda}")));
    }
    let delta = steps.delta;
    if !(delta > 0.0) || steps.coeffs.is_empty() {
        return Err(invalid("lattice steps need δ > 0 and at least one cell"));
    }
    let k = steps.coeffs.len();
    let (m, k0, end) = match f {
        Some(g) => {
            let m = fft::next_pow2((delta / g.step - 1e-9).ceil().max(1.0) as usize);
            let k0 = ((steps.start - g.origin) / delta - 1e-9).ceil().max(0.0) as usize;
            (m, k0, g.end().max(steps.start + k as f64 * delta))
        }
        None => (1, 0, steps.start + k as f64 * delta),
    };
    let a = steps.start - k0 as f64 * delta;
    let n = fft::next_pow2(((end - a + 40.0 / lambda) / delta).ceil() as usize + 1);
    let nf = n * m;
    let hf = delta / m as f64;

    let mut fine = vec![Complex64::new(0.0, 0.0); nf];
    if let Some(g) = f {
        let i0 = ((g.origin - a) / hf).floor().max(0.0) as usize;
        let i1 = (((g.end() - a) / hf).ceil() as usize + 1).min(nf);
        for (i, v) in fine.iter_mut().enumerate().take(i1).skip(i0) {
            *v = Complex64::new(g.interpolate(a + i as f64 * hf), 0.0);
        }
        fft::forward(&mut fine);
    }
    let mut chat = vec![Complex64::new(0.0, 0.0); n];
    for (j, &c) in steps.coeffs.iter().enumerate() {
        chat[k0 + j] = Complex64::new(c, 0.0);
    }
    fft::forward(&mut chat);

    let l2 = lambda * lambda;
    let mut inner = 0.0;
    for (idx, fv) in fine.iter().enumerate() {
        let w = fft::bin_frequency(idx, nf, hf);
        let step_part = chat[idx % n] * delta * sinc(0.5 * w * delta) * Complex64::from_polar(1.0, -0.5 * w * delta);
        let d = *fv * hf - step_part;
        inner += d.norm_sqr() * (l2 + w * w).powf(0.5 - h);
    }
    inner /= 2.0 * PI;

    // Bins outside the fine range hold f̂_n only.
    let spacing = 2.0 * PI / delta;
    let half = (nf / 2) as i64;
    let mut outer = 0.0;
    let mut tail_mass = 0.0;
    for (r, c) in chat.iter().enumerate() {
        let phi = 2.0 * PI * r as f64 / n as f64;
        let amp = c.norm_sqr() * 4.0 * (0.5 * phi).sin().powi(2);
        if amp == 0.0 {
            continue;
        }
        let (ri, ni) = (r as i64, n as i64);
        let m_pos = (half - ri).div_euclid(ni) + 1;
        let m_neg = (-half - ri).div_euclid(ni);
        let w_pos = 2.0 * PI * (ri + m_pos * ni) as f64 / (n as f64 * delta);
        let w_neg = 2.0 * PI * (-(ri + m_neg * ni)) as f64 / (n as f64 * delta);
        let (sp, tp) = alias_sum(w_pos, spacing, h, lambda);
        let (sn, tn) = alias_sum(w_neg, spacing, h, lambda);
        outer += amp * (sp + sn);
        tail_mass += amp * (tp + tn);
    }
    outer /= 2.0 * PI;
    tail_mass /= 2.0 * PI;

    let g2 = gamma(h - 0.5).powi(2);
    let dw = 2.0 * PI / (n as f64 * delta);
    let d2 = g2 * dw * (inner + outer);
    let err2 = g2 * dw * (1e-3 * tail_mass) + 1e-12 * d2;
    let v = d2.sqrt();
    Ok(Estimate { value: v, est_error: if v > 0.0 { 0.5 * err2 / v } else { err2.sqrt() } })
}
