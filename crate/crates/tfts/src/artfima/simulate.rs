use super::{ar_spectral_radius, ArtfimaModel};
use crate::error::{invalid, Result};
use crate::fft::convolve;
use crate::grid::GridFunction;
use crate::rng::PhiloxStream;
use crate::tfcalc::{frac_weights, WeightKind};

/// Steps needed for the AR recursion to forget its zero start (to 1e-16), capped at 10⁶.
fn burn_in(model: &ArtfimaModel) -> usize {
    let r = ar_spectral_radius(&model.ar);
    let ar = if r == 0.0 { model.ar.len() } else { ((1e-16f64).ln() / r.ln()).ceil().min(1e6) as usize };
    ar.max(model.ma.len())
}

/// Simulates X_1 … X_n from stream 0 of the Philox generator keyed by `seed`.
///
/// The fractional filter is truncated at `j` terms (default: the 1e-10 tail
/// rule of the integration weights); `j` plus any ARMA burn-in presamples are
/// drawn first and discarded, so X_1 is already stationary.
pub fn simulate(model: &ArtfimaModel, n: usize, seed: u64, j: Option<usize>) -> Result<GridFunction> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 samples, got {n}")));
    }
    let w = frac_weights(model.alpha, model.lambda, 1.0, WeightKind::Integration, j)?;
    let jt = w.truncation();
    let burn = burn_in(model);
    let total = n + burn;
    let mut z = vec![0.0; total + jt];
    PhiloxStream::new(seed, 0).fill_normal(&mut z);
    for v in z.iter_mut() {
        *v *= model.sigma;
    }
    let x: Vec<f64> = convolve(&z, &w.w, total + jt).split_off(jt);
    let y = if model.is_pure() {
        x
    } else {
        let mut y = vec![0.0; total];
        for t in 0..total {
            let mut s = x[t];
            for (i, th) in model.ma.iter().enumerate() {
                if t > i {
                    s += th * x[t - i - 1];
                }
            }
            for (i, ph) in model.ar.iter().enumerate() {
                if t > i {
                    s += ph * y[t - i - 1];
                }
            }
            y[t] = s;
        }
        y
    };
    GridFunction::new(1.0, 1.0, y[burn..].to_vec())
}
