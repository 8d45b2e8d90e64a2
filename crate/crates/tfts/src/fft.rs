//! Thin wrappers over rustfft with the continuous-transform conventions
//! used across the crate: F[f](ω) = (2π)^{−1/2} ∫ e^{−iωx} f(x) dx.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

pub fn forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Inverse transform including the 1/N normalization.
pub fn inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

/// Angular frequency of FFT bin `k` on a length-`n` buffer with sample step `h`.
/// Bins above n/2 are negative; the Nyquist bin is reported as +π/h.
pub fn bin_frequency(k: usize, n: usize, h: f64) -> f64 {
    let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * PI * kk / (n as f64 * h)
}

/// Linear convolution of two real sequences, truncated to `out_len`.
pub fn convolve(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0; out_len];
    }
    if a.len().min(b.len()) < 64 {
        let mut out = vec![0.0; out_len];
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(b.len() - 1);
            let hi = i.min(a.len() - 1);
            let mut s = 0.0;
            for j in lo..=hi {
                s += a[j] * b[i - j];
            }
            *o = s;
        }
        return out;
    }
    let n = next_pow2(a.len() + b.len());
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(n, Complex64::new(0.0, 0.0));
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse(&mut fa);
    (0..out_len).map(|i| if i < n { fa[i].re } else { 0.0 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_matches_direct() {
        let a: Vec<f64> = (0..300).map(|i| ((i as f64) * 0.37).sin()).collect();
        let b: Vec<f64> = (0..200).map(|i| (-(i as f64) * 0.05).exp()).collect();
        let fast = convolve(&a, &b, 400);
        for i in [0usize, 17, 199, 250, 399] {
            let lo = i.saturating_sub(b.len() - 1);
            let direct: f64 = (lo..=i.min(a.len() - 1)).map(|j| a[j] * b[i - j]).sum();
            assert!((fast[i] - direct).abs() < 1e-11);
        }
    }
}
