use super::{variance, CovMethod, ThpParams};
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::linalg::{Cholesky, SymMatrix};
use crate::rng::PhiloxStream;
use rayon::prelude::*;
use serde::Serialize;

/// Covariance of Z on the grid points after t₀ = 0, with its Cholesky factor.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceMatrix {
    pub grid: Vec<f64>,
    pub entries: SymMatrix,
    pub factor: Cholesky,
    pub jitter_used: f64,
}

impl CovarianceMatrix {
    pub fn new(p: &ThpParams, times: &[f64], method: CovMethod) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_some_and(|&t| t <= 0.0) {
            return Err(invalid("grid times must be positive and strictly increasing"));
        }
        // Each entry needs V at t_i, t_j and |t_i − t_j|; evaluate every distinct argument once.
        let n = times.len();
        let mut args: Vec<f64> = times.to_vec();
        for i in 0..n {
            for j in 0..i {
                args.push(times[i] - times[j]);
            }
        }
        args.sort_by(|a, b| a.total_cmp(b));
        args.dedup();
        let vals: Vec<f64> = args.par_iter().map(|&u| variance(p, u, method)).collect::<Result<_>>()?;
        let v = |u: f64| vals[args.partition_point(|&a| a < u)];
        let entries =
            SymMatrix::from_fn(n, |i, j| if i == j { v(times[i]) } else { 0.5 * (v(times[i]) + v(times[j]) - v(times[i] - times[j])) });
        let factor = Cholesky::new(&entries)?;
        let jitter_used = factor.jitter;
        Ok(CovarianceMatrix { grid: times.to_vec(), entries, factor, jitter_used })
    }

    /// ‖L Lᵀ − R‖_F / ‖R‖_F.
    pub fn reconstruction_error(&self) -> f64 {
        let n = self.grid.len();
        let l = &self.factor.l;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..=i.min(j)).map(|k| l[i * n + k] * l[j * n + k]).sum();
                let r = self.entries.get(i, j);
                num += (s - r) * (s - r);
                den += r * r;
            }
        }
        (num / den).sqrt()
    }
}

/// One Gaussian path on `0 = t₀ < t₁ < … < t_N` (uniform grid of step `t_max/N`),
/// from Philox stream `stream` of `seed`.
pub fn synthesize_path(p: &ThpParams, n: usize, t_max: f64, seed: u64, stream: u64) -> Result<GridFunction> {
    if n == 0 || n > 4096 {
        return Err(invalid(format!("grid size must be in 1..=4096, got {n}")));
    }
    let h = t_max / n as f64;
    let times: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let cov = CovarianceMatrix::new(p, &times, CovMethod::Spectral)?;
    Ok(path_from(&cov, h, seed, stream))
}

/// Draws a path from an assembled covariance matrix on a uniform grid of step `h`.
pub fn path_from(cov: &CovarianceMatrix, h: f64, seed: u64, stream: u64) -> GridFunction {
    let mut z = vec![0.0; cov.grid.len()];
    PhiloxStream::new(seed, stream).fill_normal(&mut z);
    let mut x = vec![0.0];
    x.extend(cov.factor.mul_lower(&z));
    GridFunction { origin: 0.0, step: h, samples: x }
}
