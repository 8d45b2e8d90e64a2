//! Dense symmetric matrices and Cholesky factorization.

use crate::error::{Error, Result};
use serde::Serialize;

/// Row-major symmetric matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix { n, data }
    }

    /// Symmetric Toeplitz matrix with first row `r`.
    pub fn toeplitz(r: &[f64]) -> Self {
        Self::from_fn(r.len(), |i, j| r[i.abs_diff(j)])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).abs()).fold(0.0, f64::max)
    }
}

/// Lower-triangular Cholesky factor, row-major.
#[derive(Debug, Clone, Serialize)]
pub struct Cholesky {
    pub n: usize,
    pub l: Vec<f64>,
    /// Diagonal jitter (relative to the largest diagonal entry) that was needed.
    pub jitter: f64,
}

fn try_cholesky(a: &SymMatrix, shift: f64) -> Option<Vec<f64>> {
    let n = a.n;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            if i == j {
                s += shift;
            }
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

impl Cholesky {
    /// Factorizes `a`, retrying with relative diagonal jitter 1e-12 then 1e-10.
    pub fn new(a: &SymMatrix) -> Result<Self> {
        let scale = a.max_diag();
        for jitter in [0.0, 1e-12, 1e-10] {
            if let Some(l) = try_cholesky(a, jitter * scale) {
                return Ok(Cholesky { n: a.n, l, jitter });
            }
        }
        Err(Error::NumericalRank(format!("matrix of order {} is not positive definite even with 1e-10 relative jitter", a.n)))
    }

    /// Factorization without jitter; `None` if the matrix is not positive definite.
    pub fn strict(a: &SymMatrix) -> Option<Self> {
        try_cholesky(a, 0.0).map(|l| Cholesky { n: a.n, l, jitter: 0.0 })
    }

    /// `L·z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| self.l[i * n..i * n + i + 1].iter().zip(z).map(|(a, b)| a * b).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_the_matrix() {
        let a = SymMatrix::from_fn(6, |i, j| (-(i as f64 - j as f64).abs() * 0.3).exp());
        let c = Cholesky::new(&a).unwrap();
        assert_eq!(c.jitter, 0.0);
        for i in 0..6 {
            for j in 0..6 {
                let v: f64 = (0..6).map(|k| c.l[i * 6 + k] * c.l[j * 6 + k]).sum();
                assert!((v - a.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jitter_ladder_and_failure() {
        let singular = SymMatrix::from_fn(3, |_, _| 1.0);
        assert!(Cholesky::new(&singular).unwrap().jitter > 0.0);
        let indefinite = SymMatrix::toeplitz(&[1.0, 2.0]);
        assert!(matches!(Cholesky::new(&indefinite), Err(Error::NumericalRank(_))));
    }
}
