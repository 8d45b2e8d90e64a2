use crate::error::Result;
use crate::fft;
use crate::grid::GridFunction;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralBoundary {
    /// Zero padding to the next power of two ≥ max(4n, n + 40/(λh)).
    ZeroPadded,
    /// The grid is one period; no padding.
    Periodic,
}

/// Multiplies the discrete transform of `f` by `sym(ω)` and inverts.
///
/// The Nyquist bin uses the real part of the symbol so that real input
/// maps to real output.
pub fn spectral_apply<S: Fn(f64) -> Complex64>(f: &GridFunction, sym: S, lambda: f64, boundary: SpectralBoundary) -> Result<GridFunction> {
    let n = f.len();
    let h = f.step;
    let len = match boundary {
        SpectralBoundary::Periodic => n,
        SpectralBoundary::ZeroPadded => {
            let decay = (40.0 / (lambda * h)).ceil();
            let decay = if decay.is_finite() { decay.min(1e8) as usize } else { n };
            fft::next_pow2((4 * n).max(n + decay))
        }
    };
    let mut buf: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    fft::forward(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let s = sym(fft::bin_frequency(k, len, h));
        *v *= if len % 2 == 0 && k == len / 2 { Complex64::new(s.re, 0.0) } else { s };
    }
    fft::inverse(&mut buf);
    GridFunction::new(f.origin, h, buf[..n].iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfcalc::{symbol, Sign};

    #[test]
    fn constant_on_periodic_grid() {
        let f = GridFunction::new(0.0, 0.1, vec![2.5; 64]).unwrap();
        let g = spectral_apply(&f, |w| symbol(-0.6, 0.8, Sign::Plus, w), 0.8, SpectralBoundary::Periodic).unwrap();
        let target = 0.8f64.powf(-0.6) * 2.5;
        assert!(g.samples.iter().all(|v| (v - target).abs() < 1e-13));
    }

    #[test]
    fn exponential_kernel_for_unit_order() {
        // 𝕀₊ with α = 1 of a narrow Gaussian approximates a one-sided exponential.
        let lam = 0.5;
        let f = GridFunction::from_fn(-10.0, 0.01, 8000, |x| (-x * x * 400.0).exp() * 20.0 / std::f64::consts::PI.sqrt()).unwrap();
        let g = spectral_apply(&f, |w| symbol(-1.0, lam, Sign::Plus, w), lam, SpectralBoundary::ZeroPadded).unwrap();
        for x in [1.0, 5.0, 30.0] {
            let exact = (-lam * x).exp() * (lam * lam / 1600.0f64).exp();
            assert!((g.interpolate(x) - exact).abs() < 1e-10, "{x}");
        }
    }
}
