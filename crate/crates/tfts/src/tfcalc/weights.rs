use crate::error::{domain, Error, Result};
use crate::grid::GridFunction;
use serde::Serialize;

/// Which binomial weights: the tempered difference or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightKind {
    Difference,
    Integration,
}

/// Tempered binomial weights `w_j·e^{−λjh}`, j = 0..=J.
#[derive(Debug, Clone, Serialize)]
pub struct FracWeights {
    pub alpha: f64,
    pub lambda: f64,
    pub h: f64,
    pub kind: WeightKind,
    pub w: Vec<f64>,
    /// Bound on Σ_{j>J} |w_j e^{−λjh}|.
    pub tail_bound: f64,
}

impl FracWeights {
    pub fn truncation(&self) -> usize {
        self.w.len() - 1
    }

    pub fn l1_norm(&self) -> f64 {
        self.w.iter().map(|v| v.abs()).sum()
    }
}

fn ratio(kind: WeightKind, alpha: f64, j: usize) -> f64 {
    let jf = j as f64;
    match kind {
        WeightKind::Difference => (jf - 1.0 - alpha) / jf,
        WeightKind::Integration => (jf - 1.0 + alpha) / jf,
    }
}

fn tail_bound(kind: WeightKind, alpha: f64, decay: f64, j: usize, wj: f64) -> f64 {
    let jf = j as f64;
    let a = wj.abs();
    if a == 0.0 {
        return 0.0;
    }
    match kind {
        WeightKind::Difference => {
            if decay < 1.0 {
                // |w_{j+1}/w_j| ≤ 1 once j > α.
                if jf > alpha {
                    a * decay / (1.0 - decay)
                } else {
                    f64::INFINITY
                }
            } else if jf > alpha {
                a * (jf + 1.0) / alpha
            } else {
                f64::INFINITY
            }
        }
        WeightKind::Integration => {
            let rho = decay * ((jf + alpha) / (jf + 1.0)).max(1.0);
            if rho < 1.0 {
                a * rho / (1.0 - rho)
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Tempered binomial weights by the multiplicative recurrence.
///
/// With `j_max = None` the truncation is the smallest J whose tail bound is
/// at most 1e-10 of the weight ℓ¹ norm, capped at 10⁶. Weights that
/// underflow stop the recurrence early and the shorter J is recorded.
pub fn frac_weights(alpha: f64, lambda: f64, h: f64, kind: WeightKind, j_max: Option<usize>) -> Result<FracWeights> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("α must be positive, got {alpha}")));
    }
    if !(lambda >= 0.0) || !(h > 0.0) {
        return Err(domain(format!("need λ ≥ 0 and h > 0, got λ = {lambda}, h = {h}")));
    }
    if j_max == Some(0) {
        return Err(Error::Invalid("truncation J must be at least 1".into()));
    }
    const CAP: usize = 1_000_000;
    let decay = (-lambda * h).exp();
    let mut w = vec![1.0];
    let mut l1 = 1.0;
    let mut prev = 1.0;
    let limit = j_max.unwrap_or(CAP);
    let mut bound = f64::INFINITY;
    for j in 1..=limit {
        let next = prev * ratio(kind, alpha, j) * decay;
        if next != 0.0 && next.abs() < 1e-300 {
            bound = tail_bound(kind, alpha, decay, j - 1, prev);
            break;
        }
        w.push(next);
        l1 += next.abs();
        prev = next;
        bound = tail_bound(kind, alpha, decay, j, next);
        if next == 0.0 && kind == WeightKind::Difference && alpha == alpha.floor() {
            // Integer order: all remaining weights vanish.
            bound = 0.0;
            if j_max.is_none() {
                break;
            }
        }
        if j_max.is_none() && bound <= 1e-10 * l1 {
            break;
        }
    }
    Ok(FracWeights { alpha, lambda, h, kind, w, tail_bound: bound })
}

/// How to treat samples before the start of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum History {
    /// Output only where the full J-term history exists.
    Subgrid,
    /// Treat missing history as zero; output on the whole grid.
    ZeroPadded,
}

/// Discrete convolution Σ_j w_j f(x − jh) with precomputed weights.
pub fn apply_weights(f: &GridFunction, weights: &FracWeights, history: History) -> Result<GridFunction> {
    if (weights.h - f.step).abs() > 1e-12 * f.step {
        return Err(Error::Shape(format!("weights use h = {}, grid step is {}", weights.h, f.step)));
    }
    let j = weights.truncation();
    let n = f.len();
    let conv = crate::fft::convolve(&f.samples, &weights.w, n);
    match history {
        History::ZeroPadded => GridFunction::new(f.origin, f.step, conv),
        History::Subgrid => {
            if n < j + 2 {
                return Err(Error::Shape(format!("grid has {n} samples, a J = {j} history needs at least {}", j + 2)));
            }
            GridFunction::new(f.x(j), f.step, conv[j..].to_vec())
        }
    }
}

/// Tempered fractional difference Δ_h^{α,λ} f.
pub fn tempered_difference(f: &GridFunction, alpha: f64, lambda: f64, j: Option<usize>, history: History) -> Result<GridFunction> {
    let w = frac_weights(alpha, lambda, f.step, WeightKind::Difference, j)?;
    apply_weights(f, &w, history)
}

/// Inverse tempered fractional difference Δ_h^{−α,λ} f.
pub fn tempered_summation(f: &GridFunction, alpha: f64, lambda: f64, j: Option<usize>, history: History) -> Result<GridFunction> {
    if lambda == 0.0 && j.is_none() {
        return Err(domain("untempered summation weights are not summable; give J explicitly"));
    }
    let w = frac_weights(alpha, lambda, f.step, WeightKind::Integration, j)?;
    apply_weights(f, &w, history)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_recurrence() {
        let w = frac_weights(0.5, 0.0, 1.0, WeightKind::Difference, Some(3)).unwrap();
        assert_eq!(w.w, vec![1.0, -0.5, -0.125, -0.0625]);
        let lam: f64 = 0.7;
        let w = frac_weights(1.0, lam, 1.0, WeightKind::Difference, Some(4)).unwrap();
        assert!((w.w[1] + (-lam).exp()).abs() < 1e-16);
        assert!(w.w[2..].iter().all(|&v| v == 0.0));
        assert_eq!(w.tail_bound, 0.0);
    }

    #[test]
    fn integration_weights_sum() {
        let w = frac_weights(0.7, 0.2, 1.0, WeightKind::Integration, None).unwrap();
        let target = (1.0 - (-0.2f64).exp()).powf(-0.7);
        let s: f64 = w.w.iter().sum();
        assert!(w.w.iter().all(|&v| v >= 0.0));
        assert!(target - s <= w.tail_bound * 1.0000001 && s <= target * (1.0 + 1e-14));
        assert!((s / target - 1.0).abs() < 1e-9);
    }

    #[test]
    fn difference_of_constant() {
        let f = GridFunction::new(0.0, 1.0, vec![1.0; 1000]).unwrap();
        let d = tempered_difference(&f, 0.5, 0.3, Some(400), History::Subgrid).unwrap();
        let w = frac_weights(0.5, 0.3, 1.0, WeightKind::Difference, Some(400)).unwrap();
        let target = (1.0 - (-0.3f64).exp()).sqrt();
        for v in &d.samples {
            assert!((v - target).abs() <= w.tail_bound + 1e-14);
        }
    }

    #[test]
    fn first_order_is_two_term() {
        let f = GridFunction::from_fn(0.0, 1.0, 50, |x| (0.3 * x).sin()).unwrap();
        let lam: f64 = 0.4;
        let d = tempered_difference(&f, 1.0, lam, Some(1), History::Subgrid).unwrap();
        for (i, v) in d.samples.iter().enumerate() {
            let exact = f.samples[i + 1] - (-lam).exp() * f.samples[i];
            assert!((v - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn difference_then_summation_is_identity() {
        let f = GridFunction::from_fn(-10.0, 0.1, 400, |x| (-x * x).exp()).unwrap();
        let d = tempered_difference(&f, 0.6, 0.5, Some(10_000), History::ZeroPadded).unwrap();
        let s = tempered_summation(&d, 0.6, 0.5, Some(10_000), History::ZeroPadded).unwrap();
        let err = f.samples.iter().zip(&s.samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn short_history_is_a_shape_error() {
        let f = GridFunction::new(0.0, 1.0, vec![1.0; 10]).unwrap();
        assert!(matches!(tempered_difference(&f, 0.5, 0.3, Some(20), History::Subgrid), Err(Error::Shape(_))));
    }
}
