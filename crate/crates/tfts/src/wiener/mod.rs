//! Wiener integrals with respect to the tempered Hermite process.
//!
//! For H > ½ and λ > 0 the integrands form the inner-product spaces
//!
//! * 𝒜₁: ⟨f, g⟩ = Γ(H−½)² ∫ (𝕀₋^{H−½,λ} f)(𝕀₋^{H−½,λ} g) dx,
//! * 𝒜₂: ⟨f, g⟩ = Γ(H−½)² ∫ f̂(ω) conj ĝ(ω) (λ² + ω²)^{½−H} dω,
//!
//! which coincide by Plancherel, and Var ∫ f dZ = σ² ‖f‖²_{𝒜₂}.
//!
//! Step functions use exact closed forms: the 𝒜₂ product of two steps is
//! a combination of the process variance V(u) = Var Z(u), and 𝕀₋ of an
//! indicator is a difference of incomplete gammas. Grid functions go
//! through a padded FFT.

mod checks;
mod lattice;

pub use checks::{density_check, non_completeness_witness, plancherel_check, plancherel_test_set};
pub use lattice::{lattice_step_distance, LatticeSteps};

use crate::error::{domain, invalid, Error, Result};
use crate::fft;
use crate::grid::GridFunction;
use crate::quad::{gl20, integrate_breakpoints};
use crate::specfun::{gamma, lower_gamma_value, upper_gamma_value};
use crate::tfcalc::{tempered_frac_integral, IntegralBackend, Sign};
use crate::thp::{spectral_variance, ThpParams};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

/// a·1_{[lo, hi)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Step {
    pub a: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TestFunction {
    /// Σ a_i 1_{[t_i, t_{i+1})}, sorted and non-overlapping.
    Elementary(Vec<Step>),
    /// Samples of a function vanishing at both grid ends.
    Grid(GridFunction),
}

/// A value with an estimate of its absolute numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub est_error: f64,
}

impl TestFunction {
    /// Checks ordering, merges touching steps with equal heights and drops zero steps.
    pub fn elementary(steps: Vec<Step>) -> Result<Self> {
        let mut out: Vec<Step> = Vec::with_capacity(steps.len());
        for (i, s) in steps.iter().enumerate() {
            if !(s.a.is_finite() && s.lo.is_finite() && s.hi.is_finite()) {
                return Err(invalid(format!("step {i} is not finite")));
            }
            if !(s.lo < s.hi) {
                return Err(invalid(format!("step {i} has lo = {} ≥ hi = {}", s.lo, s.hi)));
            }
            if i > 0 && s.lo < steps[i - 1].hi {
                return Err(invalid(format!("step {i} overlaps or precedes step {}", i - 1)));
            }
            if s.a == 0.0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.hi == s.lo && last.a == s.a => last.hi = s.hi,
                _ => out.push(*s),
            }
        }
        Ok(TestFunction::Elementary(out))
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::elementary(vec![Step { a: 1.0, lo, hi }])
    }

    pub fn grid(g: GridFunction) -> Result<Self> {
        let leak = g.boundary_leak();
        if leak > 1e-12 {
            return Err(invalid(format!("grid function does not vanish at the grid ends (relative boundary mass {leak:.3e})")));
        }
        Ok(TestFunction::Grid(g))
    }

    /// Smallest interval outside which the function vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            TestFunction::Elementary(s) => Some((s.first()?.lo, s.last()?.hi)),
            TestFunction::Grid(g) => Some((g.origin, g.end())),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Elementary(s) => s.iter().find(|st| st.lo <= x && x < st.hi).map_or(0.0, |st| st.a),
            TestFunction::Grid(g) => g.interpolate(x),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            TestFunction::Elementary(s) => s.iter().map(|st| st.a * st.a * (st.hi - st.lo)).sum::<f64>().sqrt(),
            TestFunction::Grid(g) => g.l2_norm(),
        }
    }

    /// f̂(ω) = (2π)^{−1/2} ∫ e^{−iωx} f(x) dx; trapezoid sum for grids.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        let c = 1.0 / (2.0 * PI).sqrt();
        match self {
            TestFunction::Elementary(s) => c * s.iter().map(|st| step_transform(st, omega)).sum::<Complex64>(),
            TestFunction::Grid(g) => {
                c * g.step * g.samples.iter().enumerate().map(|(i, &v)| v * Complex64::from_polar(1.0, -omega * g.x(i))).sum::<Complex64>()
            }
        }
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        match self {
            TestFunction::Elementary(s) => {
                if c == 0.0 {
                    TestFunction::Elementary(Vec::new())
                } else {
                    TestFunction::Elementary(s.iter().map(|st| Step { a: c * st.a, ..*st }).collect())
                }
            }
            TestFunction::Grid(g) => TestFunction::Grid(g.map(|v| c * v)),
        }
    }
}

pub(crate) fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// ∫_lo^hi a e^{−iωx} dx in a form that stays accurate as ω → 0.
fn step_transform(st: &Step, omega: f64) -> Complex64 {
    let w = st.hi - st.lo;
    let m = 0.5 * (st.lo + st.hi);
    st.a * w * sinc(0.5 * omega * w) * Complex64::from_polar(1.0, -omega * m)
}

fn check_h(h: f64, lambda: f64) -> Result<f64> {
    if !(h > 0.5 && h.is_finite()) {
        return Err(domain(format!("H must exceed 1/2, got {h}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("λ must be positive, got {lambda}")));
    }
    let g = gamma(h - 0.5);
    Ok(g * g)
}

/// ⟨f, g⟩_{𝒜₂}, valid for every H > ½.
pub fn a2_inner(f: &TestFunction, g: &TestFunction, h: f64, lambda: f64) -> Result<Estimate> {
    let g2 = check_h(h, lambda)?;
    match (f, g) {
        (TestFunction::Elementary(a), TestFunction::Elementary(b)) => Ok(elementary_a2(a, b, h, lambda)),
        _ => {
            let e = frequency_a2(f, g, h, lambda)?;
            Ok(Estimate { value: g2 * e.value, est_error: g2 * e.est_error })
        }
    }
}

/// ‖f‖_{𝒜₂}.
pub fn a2_norm(f: &TestFunction, h: f64, lambda: f64) -> Result<Estimate> {
    let e = a2_inner(f, f, h, lambda)?;
    let v = e.value.max(0.0).sqrt();
    Ok(Estimate { value: v, est_error: if v > 0.0 { 0.5 * e.est_error / v } else { e.est_error.sqrt() } })
}

/// ‖f − g‖_{𝒜₂} from the three inner products.
pub fn a2_distance(f: &TestFunction, g: &TestFunction, h: f64, lambda: f64) -> Result<Estimate> {
    let ff = a2_inner(f, f, h, lambda)?;
    let fg = a2_inner(f, g, h, lambda)?;
    let gg = a2_inner(g, g, h, lambda)?;
    let d2 = ff.value - 2.0 * fg.value + gg.value;
    let err = ff.est_error + 2.0 * fg.est_error + gg.est_error;
    let v = d2.max(0.0).sqrt();
    Ok(Estimate { value: v, est_error: if v > 0.0 { 0.5 * err / v } else { err.sqrt() } })
}

/// Step × step products through V: ⟨1_{[t₁,t₂)}, 1_{[s₁,s₂)}⟩ =
/// ½[V(s₂−t₁) + V(s₁−t₂) − V(s₁−t₁) − V(s₂−t₂)] with V for σ = 1.
fn elementary_a2(a: &[Step], b: &[Step], h: f64, lambda: f64) -> Estimate {
    let p = ThpParams { h, lambda, sigma: 1.0 };
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut v = |d: f64| -> f64 {
        let d = d.abs();
        *cache.entry(d.to_bits()).or_insert_with(|| spectral_variance(&p, d))
    };
    let mut total = 0.0;
    let mut mag = 0.0;
    for x in a {
        for y in b {
            let terms = [v(y.hi - x.lo), v(y.lo - x.hi), -v(y.lo - x.lo), -v(y.hi - x.hi)];
            let c = 0.5 * x.a * y.a;
            total += c * terms.iter().sum::<f64>();
            mag += c.abs() * terms.iter().map(|t| t.abs()).sum::<f64>();
        }
    }
    Estimate { value: total, est_error: 1e-11 * mag }
}

/// Grid step and common frame for transforms involving grid functions.
struct Frame {
    start: f64,
    step: f64,
    n: usize,
}

/// Frame on the grid lattice starting `left_margin` before the joint support;
/// `length` is the required frame length beyond its start.
fn frame_for(fs: &[&TestFunction], left_margin: f64, length: impl Fn(f64) -> f64) -> Result<Frame> {
    let mut step: Option<(f64, f64)> = None;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in fs {
        if let TestFunction::Grid(g) = f {
            match step {
                None => step = Some((g.step, g.origin)),
                Some((s, o)) => {
                    if (s - g.step).abs() > 1e-14 * s {
                        return Err(Error::Shape(format!("grid steps differ: {s} vs {}", g.step)));
                    }
                    let off = (g.origin - o) / s;
                    if (off - off.round()).abs() > 1e-9 {
                        return Err(Error::Shape("grid origins are not on a common lattice".into()));
                    }
                }
            }
        }
        if let Some((a, b)) = f.support() {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    let (step, origin) = step.ok_or_else(|| invalid("no grid function to define a frame"))?;
    let start = origin - ((origin - lo + left_margin) / step - 1e-9).ceil().max(0.0) * step;
    let n = (length(hi - start) / step).ceil() as usize + 1;
    Ok(Frame { start, step, n })
}

/// Continuous transform of a grid function at the frame's FFT bins.
fn grid_transform(g: &GridFunction, fr: &Frame) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); fr.n];
    let off = ((g.origin - fr.start) / fr.step).round() as usize;
    for (i, &v) in g.samples.iter().enumerate() {
        buf[off + i] = Complex64::new(v, 0.0);
    }
    fft::forward(&mut buf);
    let c = fr.step / (2.0 * PI).sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        let w = fft::bin_frequency(k, fr.n, fr.step);
        *v *= c * Complex64::from_polar(1.0, -w * fr.start);
    }
    buf
}

/// ∫ f̂ conj ĝ (λ² + ω²)^{½−H} dω by the trapezoid rule on FFT bins.
fn frequency_a2(f: &TestFunction, g: &TestFunction, h: f64, lambda: f64) -> Result<Estimate> {
    let mut fr = frame_for(&[f, g], 0.0, |span| 2.0 * span + 40.0 / lambda)?;
    fr.n = fft::next_pow2(fr.n);
    let transform = |t: &TestFunction| -> Vec<Complex64> {
        match t {
            TestFunction::Grid(gr) => grid_transform(gr, &fr),
            TestFunction::Elementary(_) => (0..fr.n).map(|k| t.fourier(fft::bin_frequency(k, fr.n, fr.step))).collect(),
        }
    };
    let fh = transform(f);
    let gh = if std::ptr::eq(f, g) { fh.clone() } else { transform(g) };
    let dw = 2.0 * PI / (fr.n as f64 * fr.step);
    let mut s = 0.0;
    let mut mag = 0.0;
    for k in 0..fr.n {
        let w = fft::bin_frequency(k, fr.n, fr.step);
        let term = (fh[k] * gh[k].conj()).re * (lambda * lambda + w * w).powf(0.5 - h);
        s += term;
        mag += term.abs();
    }
    let nyq = fr.n / 2;
    let edge = (fh[nyq] * gh[nyq].conj()).norm() * (lambda * lambda + (PI / fr.step).powi(2)).powf(0.5 - h);
    Ok(Estimate { value: dw * s, est_error: dw * (1e-15 * mag * (fr.n as f64).sqrt()) + edge * PI / fr.step })
}

/// Γ(α)·𝕀₋^{α,λ} of a step function at x:
/// λ^{−α} Σ a_i [γ(α, λ(t_{i+1}−x)₊) − γ(α, λ(t_i−x)₊)].
fn elementary_minus_integral(steps: &[Step], alpha: f64, lambda: f64, x: f64) -> f64 {
    let mut s = 0.0;
    for st in steps {
        let u1 = lambda * (st.hi - x);
        if u1 <= 0.0 {
            continue;
        }
        let u0 = lambda * (st.lo - x);
        let v = if u0 <= 0.0 {
            lower_gamma_value(alpha, u1)
        } else if u0 > alpha + 1.0 {
            upper_gamma_value(alpha, u0) - upper_gamma_value(alpha, u1)
        } else {
            lower_gamma_value(alpha, u1) - lower_gamma_value(alpha, u0)
        };
        s += st.a * v;
    }
    s * lambda.powf(-alpha)
}

/// ⟨f, g⟩_{𝒜₁} for ½ < H < 1.
///
/// Two step functions use the closed form of 𝕀₋ and adaptive panels
/// refined toward every breakpoint. Two grid functions use the chosen
/// tfcalc backend on a frame extended by 40/λ to the left.
pub fn a1_inner(f: &TestFunction, g: &TestFunction, h: f64, lambda: f64, backend: IntegralBackend) -> Result<Estimate> {
    let g2 = check_h(h, lambda)?;
    if h >= 1.0 {
        return Err(domain(format!("the 𝒜₁ route needs H < 1, got {h}; use a2_inner")));
    }
    let alpha = h - 0.5;
    match (f, g) {
        (TestFunction::Elementary(a), TestFunction::Elementary(b)) => Ok(elementary_a1(a, b, alpha, lambda)),
        (TestFunction::Grid(a), TestFunction::Grid(b)) => {
            let fr = frame_for(&[f, g], 40.0 / lambda, |span| span)?;
            let ext = |gr: &GridFunction| -> Result<GridFunction> {
                let left = ((gr.origin - fr.start) / fr.step).round() as usize;
                let right = fr.n - left - gr.len();
                let e = gr.zero_extend(left, right);
                Ok(tempered_frac_integral(&e, alpha, lambda, Sign::Minus, backend)?.values)
            };
            let fa = ext(a)?;
            let fb = if std::ptr::eq(f, g) { fa.clone() } else { ext(b)? };
            let s: f64 = fa.samples.iter().zip(&fb.samples).map(|(x, y)| x * y).sum();
            let value = g2 * fr.step * s;
            let tail = g2 * (fa.samples[0] * fb.samples[0]).abs() / (2.0 * lambda);
            Ok(Estimate { value, est_error: tail + 1e-13 * value.abs() })
        }
        _ => Err(invalid("the 𝒜₁ route needs two step functions or two grid functions")),
    }
}

fn elementary_a1(a: &[Step], b: &[Step], alpha: f64, lambda: f64) -> Estimate {
    const LEVELS: usize = 40;
    let mut pts: Vec<f64> = a.iter().chain(b).flat_map(|s| [s.lo, s.hi]).collect();
    if pts.is_empty() {
        return Estimate { value: 0.0, est_error: 0.0 };
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let integrand = |x: f64| elementary_minus_integral(a, alpha, lambda, x) * elementary_minus_integral(b, alpha, lambda, x);
    let rule = gl20();
    let mut breaks: Vec<f64> = Vec::new();
    // Left tail: dyadic toward pts[0], then doubling out to 40/λ.
    let span = (pts[pts.len() - 1] - pts[0]).max(1e-3);
    let s0 = span.min(1.0 / lambda);
    let mut d = s0;
    let mut far = vec![];
    while d < 40.0 / lambda {
        d *= 2.0;
        far.push(pts[0] - d);
    }
    far.reverse();
    breaks.extend(far);
    for l in 0..=LEVELS {
        breaks.push(pts[0] - s0 * 0.5f64.powi(l as i32));
    }
    breaks.push(pts[0]);
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let half = 0.5 * (q - p);
        for l in (1..=LEVELS).rev() {
            breaks.push(p + half * 0.5f64.powi(l as i32));
        }
        breaks.push(p + half);
        for l in 1..=LEVELS {
            breaks.push(q - half * 0.5f64.powi(l as i32));
        }
        breaks.push(q);
    }
    breaks.dedup();
    let value = integrate_breakpoints(rule, &breaks, integrand);
    Estimate { value, est_error: 1e-12 * value.abs() + 1e-15 }
}

/// Var ∫ f dZ = σ² ‖f‖²_{𝒜₂}.
pub fn wiener_variance(f: &TestFunction, p: &ThpParams) -> Result<Estimate> {
    wiener_covariance(f, f, p)
}

/// Cov(∫ f dZ, ∫ g dZ) = σ² ⟨f, g⟩_{𝒜₂}.
pub fn wiener_covariance(f: &TestFunction, g: &TestFunction, p: &ThpParams) -> Result<Estimate> {
    let e = a2_inner(f, g, p.h, p.lambda)?;
    let s2 = p.sigma * p.sigma;
    Ok(Estimate { value: s2 * e.value, est_error: s2 * e.est_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thp::{thp_covariance, CovMethod};

    #[test]
    fn elementary_normalization() {
        let f = TestFunction::elementary(vec![
            Step { a: 1.0, lo: 0.0, hi: 1.0 },
            Step { a: 1.0, lo: 1.0, hi: 2.0 },
            Step { a: 0.0, lo: 2.0, hi: 3.0 },
        ])
        .unwrap();
        assert_eq!(f, TestFunction::indicator(0.0, 2.0).unwrap());
        assert!(TestFunction::elementary(vec![Step { a: 1.0, lo: 1.0, hi: 0.5 }]).is_err());
        assert!(TestFunction::elementary(vec![Step { a: 1.0, lo: 0.0, hi: 1.0 }, Step { a: 1.0, lo: 0.5, hi: 2.0 }]).is_err());
    }

    #[test]
    fn zero_function() {
        let z = TestFunction::elementary(vec![]).unwrap();
        let f = TestFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(a2_inner(&z, &f, 0.8, 1.0).unwrap().value, 0.0);
        assert_eq!(a1_inner(&z, &z, 0.8, 1.0, IntegralBackend::Spectral).unwrap().value, 0.0);
    }

    #[test]
    fn indicator_variance_is_the_process_variance() {
        let p = ThpParams::new(0.75, 0.6, 1.3).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let f = TestFunction::indicator(0.0, t).unwrap();
            let v = wiener_variance(&f, &p).unwrap().value;
            let r = thp_covariance(&p, t, t, CovMethod::KernelL2).unwrap();
            assert!((v / r - 1.0).abs() < 1e-9, "{t}: {v} vs {r}");
        }
    }

    #[test]
    fn a1_rejects_h_above_one() {
        let f = TestFunction::indicator(0.0, 1.0).unwrap();
        assert!(matches!(a1_inner(&f, &f, 1.2, 1.0, IntegralBackend::Spectral), Err(Error::Domain(_))));
        assert!(a2_inner(&f, &f, 1.2, 1.0).is_ok());
    }

    #[test]
    fn grid_indicator_agrees_with_closed_form_in_frequency() {
        // A grid Gaussian against an indicator: mixed route vs the same pair with the indicator on the grid side.
        let g = GridFunction::from_fn(-8.0, 1.0 / 32.0, 513, |x| (-x * x).exp()).unwrap();
        let gt = TestFunction::grid(g).unwrap();
        let f = TestFunction::indicator(-0.3, 0.9).unwrap();
        let v1 = a2_inner(&f, &gt, 0.7, 0.5).unwrap().value;
        let v2 = a2_inner(&gt, &f, 0.7, 0.5).unwrap().value;
        assert!((v1 - v2).abs() < 1e-13 * v1.abs());
        assert!(v1 > 0.0);
    }

    #[test]
    fn step_transform_limit() {
        let st = Step { a: 2.0, lo: 1.0, hi: 1.5 };
        let z = step_transform(&st, 0.0);
        assert!((z.re - 1.0).abs() < 1e-16 && z.im == 0.0);
        let w = 1e-7;
        let direct = Complex64::new(0.0, 1.0) * 2.0 * (Complex64::from_polar(1.0, -w * 1.5) - Complex64::from_polar(1.0, -w)) / w;
        assert!((step_transform(&st, w) - direct).norm() < 1e-8);
    }
}
