//! Gaussian quadrature rules and composite-panel helpers.
//!
//! Nodes are eigenvalues of the Jacobi matrix, located by Sturm-sequence
//! bisection; weights come from the Christoffel formula with orthonormal
//! polynomials, which avoids relying on eigenvector accuracy.

use crate::specfun::gamma;
use std::sync::OnceLock;

/// A quadrature rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn jacobi_recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        let d = if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0)) };
        diag.push(d);
        if k >= 1 {
            let bk = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
            };
            beta.push(bk);
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
    (diag, beta, mu0)
}

fn sturm_count(diag: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = diag[i] - x - beta[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn rule_from_recurrence(diag: &[f64], beta: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut lo_bound = f64::INFINITY;
    let mut hi_bound = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { beta[i - 1].sqrt() } else { 0.0 };
        let right = if i + 1 < n { beta[i].sqrt() } else { 0.0 };
        lo_bound = lo_bound.min(diag[i] - left - right);
        hi_bound = hi_bound.max(diag[i] + left + right);
    }
    let mut nodes = Vec::with_capacity(n);
    for k in 0..n {
        let (mut lo, mut hi) = (lo_bound, hi_bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, beta, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        nodes.push(0.5 * (lo + hi));
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = 0.0;
            let mut p = 1.0 / mu0.sqrt();
            let mut s = p * p;
            for k in 0..n - 1 {
                let sb_prev = if k > 0 { beta[k - 1].sqrt() } else { 0.0 };
                let next = ((x - diag[k]) * p - sb_prev * p_prev) / beta[k].sqrt();
                p_prev = p;
                p = next;
                s += p * p;
            }
            1.0 / s
        })
        .collect();
    Rule { nodes, weights }
}

/// Gauss–Jacobi rule for the weight (1−x)^a (1+x)^b on [−1, 1], a, b > −1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let (diag, beta, mu0) = jacobi_recurrence(n, a, b);
    rule_from_recurrence(&diag, &beta, mu0)
}

/// Gauss–Legendre rule with n nodes; common sizes are cached.
pub fn gauss_legendre(n: usize) -> Rule {
    static GL16: OnceLock<Rule> = OnceLock::new();
    static GL20: OnceLock<Rule> = OnceLock::new();
    static GL32: OnceLock<Rule> = OnceLock::new();
    match n {
        16 => GL16.get_or_init(|| gauss_jacobi(16, 0.0, 0.0)).clone(),
        20 => GL20.get_or_init(|| gauss_jacobi(20, 0.0, 0.0)).clone(),
        32 => GL32.get_or_init(|| gauss_jacobi(32, 0.0, 0.0)).clone(),
        _ => gauss_jacobi(n, 0.0, 0.0),
    }
}

/// Shared 20-point Gauss–Legendre rule.
pub fn gl20() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| gauss_jacobi(20, 0.0, 0.0))
}

/// Shared 32-point Gauss–Legendre rule.
pub fn gl32() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| gauss_jacobi(32, 0.0, 0.0))
}

impl Rule {
    /// ∫_a^b f for a rule with unit weight function.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }

    /// Maps the rule to [a, b]: returns (points, scaled weights) for a unit weight function.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, w * half))
    }
}

/// Composite Gauss–Legendre integral over consecutive breakpoints.
pub fn integrate_breakpoints<F: FnMut(f64) -> f64>(rule: &Rule, breaks: &[f64], mut f: F) -> f64 {
    breaks.windows(2).map(|w| rule.integrate(w[0], w[1], &mut f)).sum()
}

/// Breakpoints 0 = b₀ < s·2^{-levels} < … < s/2 < s: dyadic refinement toward 0.
pub fn dyadic_toward_zero(s: f64, levels: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    for l in (0..levels).rev() {
        v.push(s * 0.5f64.powi(l as i32 + 1));
    }
    v.push(s);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(20);
        for k in 0..40 {
            let v = r.integrate(-1.0, 1.0, |x| x.powi(k));
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((v - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn jacobi_moments() {
        // ∫_{-1}^{1} (1+x)^b x^k dx against closed forms for b = −0.4.
        let b = -0.4;
        let r = gauss_jacobi(16, 0.0, b);
        let total: f64 = r.weights.iter().sum();
        let exact0 = 2f64.powf(b + 1.0) / (b + 1.0);
        assert!((total / exact0 - 1.0).abs() < 1e-14);
        // ∫ (1+x)^b (1+x) dx = 2^{b+2}/(b+2)
        let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (1.0 + x)).sum();
        assert!((m1 / (2f64.powf(b + 2.0) / (b + 2.0)) - 1.0).abs() < 1e-14);
        let m9: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (1.0 + x).powi(9)).sum();
        assert!((m9 / (2f64.powf(b + 10.0) / (b + 10.0)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn nodes_sorted_inside_interval() {
        let r = gauss_jacobi(32, 0.0, -0.7);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes[0] > -1.0 && r.nodes[31] < 1.0);
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }
}
