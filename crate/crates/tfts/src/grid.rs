//! Uniformly sampled real functions.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Samples of a function on the grid `origin + i·step`, `i = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub origin: f64,
    pub step: f64,
    pub samples: Vec<f64>,
}

const INTERP_POINTS: usize = 10;

impl GridFunction {
    pub fn new(origin: f64, step: f64, samples: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(invalid(format!("grid step must be positive, got {step}")));
        }
        if !origin.is_finite() {
            return Err(invalid("grid origin must be finite"));
        }
        if samples.len() < 2 {
            return Err(invalid(format!("a grid function needs at least 2 samples, got {}", samples.len())));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(GridFunction { origin, step, samples })
    }

    /// Samples `f` at `origin + i·step` for `i < n`.
    pub fn from_fn<F: Fn(f64) -> f64>(origin: f64, step: f64, n: usize, f: F) -> Result<Self> {
        Self::new(origin, step, (0..n).map(|i| f(origin + i as f64 * step)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    /// Discrete L² norm with step weighting.
    pub fn l2_norm(&self) -> f64 {
        (self.step * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest endpoint magnitude relative to the peak.
    pub fn boundary_leak(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.samples[0].abs().max(self.samples[self.len() - 1].abs()) / m
    }

    /// Same samples with `left` and `right` zeros appended on either side.
    pub fn zero_extend(&self, left: usize, right: usize) -> GridFunction {
        let mut s = vec![0.0; left];
        s.extend_from_slice(&self.samples);
        s.extend(std::iter::repeat_n(0.0, right));
        GridFunction { origin: self.origin - left as f64 * self.step, step: self.step, samples: s }
    }

    /// Restriction to samples `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> GridFunction {
        GridFunction { origin: self.x(start), step: self.step, samples: self.samples[start..start + len].to_vec() }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction { origin: self.origin, step: self.step, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise `a·self + b·other` on a shared grid.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            origin: self.origin,
            step: self.step,
            samples: self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.len() != other.len()
            || (self.step - other.step).abs() > 1e-14 * self.step
            || (self.origin - other.origin).abs() > 1e-12 * self.step.max(self.origin.abs())
        {
            return Err(crate::error::Error::Shape("grid functions live on different grids".into()));
        }
        Ok(())
    }

    /// Index of the first sample of the 10-point stencil used for cell `c`
    /// (the interval between samples `c` and `c + 1`).
    pub(crate) fn stencil_start(&self, c: usize) -> usize {
        let n = self.len();
        if n <= INTERP_POINTS {
            return 0;
        }
        (c.saturating_sub(INTERP_POINTS / 2 - 1)).min(n - INTERP_POINTS)
    }

    /// Local Lagrange interpolation (degree 9) at `origin + (c + t)·step`, with
    /// `c` a cell index and `t` in [0, 1]. Cells outside the grid give 0.
    pub fn interpolate_cell(&self, c: isize, t: f64) -> f64 {
        let n = self.len() as isize;
        if c < 0 || c >= n - 1 {
            if c == n - 1 && t == 0.0 {
                return self.samples[(n - 1) as usize];
            }
            return 0.0;
        }
        let c = c as usize;
        let s0 = self.stencil_start(c);
        let m = INTERP_POINTS.min(self.len());
        let pos = (c - s0) as f64 + t;
        lagrange_equispaced(&self.samples[s0..s0 + m], pos)
    }

    /// Interpolated value at an arbitrary abscissa (0 outside the grid).
    pub fn interpolate(&self, x: f64) -> f64 {
        let u = (x - self.origin) / self.step;
        if u < 0.0 || u > (self.len() - 1) as f64 {
            return 0.0;
        }
        let r = u.round();
        if (u - r).abs() < 1e-10 {
            return self.samples[r as usize];
        }
        let c = (u.floor() as isize).min(self.len() as isize - 2);
        self.interpolate_cell(c, u - c as f64)
    }
}

/// Barycentric Lagrange interpolation through `y[k]` at nodes `k = 0..y.len()`.
pub(crate) fn lagrange_equispaced(y: &[f64], pos: f64) -> f64 {
    let m = y.len();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut w = 1.0;
    let mut weights = [0.0; 16];
    for k in 0..m {
        weights[k] = w;
        w = -w * (m - 1 - k) as f64 / (k + 1) as f64;
    }
    for k in 0..m {
        let d = pos - k as f64;
        if d == 0.0 {
            return y[k];
        }
        let t = weights[k] / d;
        num += t * y[k];
        den += t;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(0.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn interpolation_is_accurate_for_smooth_functions() {
        let g = GridFunction::from_fn(-5.0, 0.05, 201, |x| (-x * x).exp()).unwrap();
        for i in 0..1000 {
            let x = -4.9 + 9.8 * i as f64 / 999.0;
            assert!((g.interpolate(x) - (-x * x).exp()).abs() < 1e-11, "{x}");
        }
        assert_eq!(g.interpolate(-6.0), 0.0);
        assert_eq!(g.interpolate(g.x(17)), g.samples[17]);
    }

    #[test]
    fn polynomial_reproduction() {
        let g = GridFunction::from_fn(0.0, 0.3, 30, |x| x.powi(9) - 2.0 * x.powi(4) + 1.0).unwrap();
        for x in [0.01f64, 1.234, 4.5, 8.69] {
            let exact = x.powi(9) - 2.0 * x.powi(4) + 1.0;
            assert!((g.interpolate(x) - exact).abs() < 1e-8 * exact.abs().max(1.0));
        }
    }
}
