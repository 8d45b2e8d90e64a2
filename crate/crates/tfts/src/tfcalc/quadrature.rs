//! Direct quadrature backends aligned with the grid cells.
//!
//! The integrand f is represented by its local degree-9 interpolant on each
//! cell. The cell touching the evaluation point carries the kernel
//! singularity and uses Gauss–Jacobi with the exact power weight; the other
//! cells use Gauss–Legendre. Kernels are truncated where e^{−λs} < e^{−40}.

use super::Sign;
use crate::error::{domain, Result};
use crate::fft::convolve;
use crate::grid::{lagrange_equispaced, GridFunction};
use crate::quad::{gauss_jacobi, gauss_legendre, Rule};
use crate::specfun::{gamma, upper_incomplete_gamma_neg};

const JACOBI_NODES: usize = 20;
const LEGENDRE_NODES: usize = 12;
const DECAY: f64 = 40.0;

/// Node fractions σ ∈ (0, 1) of a rule mapped to the unit interval.
fn fractions(rule: &Rule) -> Vec<f64> {
    rule.nodes.iter().map(|u| 0.5 * (1.0 + u)).collect()
}

/// `out[q][c]` = interpolant of cell `c` at local position `1 − σ_q`.
/// Cell −1 (left of the grid) is included as index 0 when `with_left` is set,
/// using extrapolation from the first stencil.
fn cell_values(y: &[f64], sigma: &[f64]) -> Vec<Vec<f64>> {
    let g = GridFunction { origin: 0.0, step: 1.0, samples: y.to_vec() };
    let n = y.len();
    let m = n.min(10);
    let mut out = vec![vec![0.0; n - 1]; sigma.len()];
    for c in 0..n - 1 {
        let s0 = g.stencil_start(c);
        for (q, s) in sigma.iter().enumerate() {
            out[q][c] = lagrange_equispaced(&y[s0..s0 + m], (c - s0) as f64 + 1.0 - s);
        }
    }
    out
}

fn reversed(f: &GridFunction) -> Vec<f64> {
    f.samples.iter().rev().copied().collect()
}

fn oriented(f: &GridFunction, sign: Sign) -> Vec<f64> {
    match sign {
        Sign::Plus => f.samples.clone(),
        Sign::Minus => reversed(f),
    }
}

fn finish(f: &GridFunction, mut out: Vec<f64>, sign: Sign) -> Result<GridFunction> {
    if sign == Sign::Minus {
        out.reverse();
    }
    GridFunction::new(f.origin, f.step, out)
}

fn truncation_cells(lambda: f64, h: f64, n: usize) -> usize {
    let m = (DECAY / (lambda * h)).ceil();
    if m.is_finite() && m < (n as f64) {
        (m as usize).max(1)
    } else {
        n - 1
    }
}

/// 𝕀±^{α,λ} f by cell-aligned Gauss–Jacobi/Gauss–Legendre quadrature.
pub fn quadrature_integral(f: &GridFunction, alpha: f64, lambda: f64, sign: Sign) -> Result<GridFunction> {
    if !(alpha > 0.0) || !(lambda > 0.0) {
        return Err(domain(format!("need α > 0 and λ > 0, got α = {alpha}, λ = {lambda}")));
    }
    let y = oriented(f, sign);
    let n = y.len();
    let h = f.step;
    let g_alpha = gamma(alpha);
    let cells = truncation_cells(lambda, h, n);

    let jr = gauss_jacobi(JACOBI_NODES, 0.0, alpha - 1.0);
    let js = fractions(&jr);
    let kj: Vec<f64> = jr.weights.iter().zip(&js).map(|(w, s)| (0.5 * h).powf(alpha) * w * (-lambda * h * s).exp() / g_alpha).collect();
    let gr = gauss_legendre(LEGENDRE_NODES);
    let gs = fractions(&gr);

    let pj = cell_values(&y, &js);
    let pg = cell_values(&y, &gs);

    let mut out = vec![0.0; n];
    for i in 1..n {
        out[i] = kj.iter().zip(&pj).map(|(k, p)| k * p[i - 1]).sum::<f64>();
    }
    if cells > 1 {
        for (q, (w, s)) in gr.weights.iter().zip(&gs).enumerate() {
            let kern: Vec<f64> = (0..cells)
                .map(|m| {
                    if m == 0 {
                        0.0
                    } else {
                        let x = h * (m as f64 + s);
                        0.5 * h * w * x.powf(alpha - 1.0) * (-lambda * x).exp() / g_alpha
                    }
                })
                .collect();
            let conv = convolve(&pg[q], &kern, n - 1);
            for i in 1..n {
                out[i] += conv[i - 1];
            }
        }
    }
    finish(f, out, sign)
}

/// 𝔻±^{α,λ} f in Marchaud form, 0 < α < 1:
/// λ^α f(t) + α/Γ(1−α) ∫₀^∞ (f(t) − f(t ∓ s)) s^{−α−1} e^{−λs} ds.
pub fn marchaud_derivative(f: &GridFunction, alpha: f64, lambda: f64, sign: Sign) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("the Marchaud form needs 0 < α < 1, got {alpha}")));
    }
    if !(lambda > 0.0) {
        return Err(domain(format!("λ must be positive, got {lambda}")));
    }
    let y = oriented(f, sign);
    let n = y.len();
    let h = f.step;
    let c = alpha / gamma(1.0 - alpha);
    let la = lambda.powf(alpha);
    let cells = truncation_cells(lambda, h, n);

    let jr = gauss_jacobi(JACOBI_NODES, 0.0, -alpha);
    let js = fractions(&jr);
    let kj: Vec<f64> =
        jr.weights.iter().zip(&js).map(|(w, s)| (0.5 * h).powf(1.0 - alpha) * w * (-lambda * h * s).exp() / (h * s)).collect();
    let gr = gauss_legendre(LEGENDRE_NODES);
    let gs = fractions(&gr);
    let pj = cell_values(&y, &js);
    let pg = cell_values(&y, &gs);

    // Extrapolated first cell for the leftmost sample.
    let m0 = n.min(10);
    let left: Vec<f64> = js.iter().map(|s| lagrange_equispaced(&y[..m0], -s)).collect();

    // Σ_{m=1}^{M−1} of the Legendre kernel, as prefix sums over M.
    let mut kg = vec![vec![0.0; cells]; gs.len()];
    for (q, (w, s)) in gr.weights.iter().zip(&gs).enumerate() {
        for m in 1..cells {
            let x = h * (m as f64 + s);
            kg[q][m] = 0.5 * h * w * x.powf(-alpha - 1.0) * (-lambda * x).exp();
        }
    }
    let mut prefix = vec![0.0; cells + 1];
    for m in 1..cells {
        prefix[m + 1] = prefix[m] + kg.iter().map(|k| k[m]).sum::<f64>();
    }
    let mut tails = vec![0.0; cells + 1];
    for (m, t) in tails.iter_mut().enumerate().skip(1) {
        *t = la * upper_incomplete_gamma_neg(alpha, lambda * h * m as f64)?;
    }
    let mut conv = vec![0.0; n - 1];
    if cells > 1 {
        for q in 0..gs.len() {
            let part = convolve(&pg[q], &kg[q], n - 1);
            for (a, b) in conv.iter_mut().zip(&part) {
                *a += b;
            }
        }
    }

    let mut out = vec![0.0; n];
    for i in 0..n {
        let fi = y[i];
        let mi = i.min(cells).max(1);
        let first: f64 = if i == 0 {
            kj.iter().zip(&left).map(|(k, p)| k * (fi - p)).sum()
        } else {
            kj.iter().zip(&pj).map(|(k, p)| k * (fi - p[i - 1])).sum()
        };
        let rest = if i >= 1 { fi * prefix[mi] - conv[i - 1] } else { 0.0 };
        out[i] = la * fi + c * (first + rest + fi * tails[mi]);
    }
    finish(f, out, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_at_left_end() {
        // 𝕀₋ with α = 1 of 1_[0,1] at t = 0 is (1 − e^{−λ})/λ.
        let lam = 0.7;
        let h = 1.0 / 64.0;
        let f = GridFunction::from_fn(-1.0, h, 193, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        let g = quadrature_integral(&f, 1.0, lam, Sign::Minus).unwrap();
        let v = g.samples[64];
        let exact = (1.0 - (-lam).exp()) / lam;
        // Cell interpolation smears the jump at t = 1 over one cell.
        assert!((v - exact).abs() < 5e-3, "{v} vs {exact}");
    }

    #[test]
    fn integral_of_exponential_closed_form() {
        // Reference: ∫₀^t u² e^{−u} (t−u)^{α−1} e^{−λ(t−u)} du / Γ(α) by a 60-node Jacobi rule.
        let (alpha, lam) = (0.45, 0.6);
        let h = 0.02;
        let f = GridFunction::from_fn(0.0, h, 1500, |x| x * x * (-x).exp()).unwrap();
        let g = quadrature_integral(&f, alpha, lam, Sign::Plus).unwrap();
        let t = 3.0;
        let jr = gauss_jacobi(60, alpha - 1.0, 0.0);
        let exact: f64 = jr
            .nodes
            .iter()
            .zip(&jr.weights)
            .map(|(x, w)| {
                let u = 0.5 * t * (1.0 + x);
                w * u * u * (-u).exp() * (-lam * (t - u)).exp()
            })
            .sum::<f64>()
            * (0.5 * t).powf(alpha)
            / gamma(alpha);
        assert!((g.samples[150] - exact).abs() < 1e-10, "{} vs {exact}", g.samples[150]);
    }

    #[test]
    fn marchaud_of_constant() {
        let (alpha, lam) = (0.4, 1.0);
        let h = 0.05;
        let f = GridFunction::new(0.0, h, vec![3.0; 2000]).unwrap();
        let d = marchaud_derivative(&f, alpha, lam, Sign::Plus).unwrap();
        for i in 900..2000 {
            assert!((d.samples[i] - 3.0 * lam.powf(alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn marchaud_requires_order_below_one() {
        let f = GridFunction::new(0.0, 1.0, vec![0.0; 4]).unwrap();
        assert!(marchaud_derivative(&f, 1.2, 1.0, Sign::Plus).is_err());
    }
}
