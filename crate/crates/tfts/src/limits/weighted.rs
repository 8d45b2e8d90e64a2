use super::mc::gaussian_functionals;
use super::scheme::{CoeffKind, PartialSumScheme, XiTable};
use crate::artfima::{acvf_weight_sum, ArtfimaModel};
use crate::error::{invalid, Result};
use crate::fft::convolve;
use crate::report::ExperimentReport;
use crate::specfun::gamma;
use crate::stats::covariance_with_se;
use crate::wiener::{a2_norm, lattice_step_distance, LatticeSteps, Step, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedMode {
    Deterministic,
    MonteCarlo { paths: usize, seed: u64 },
}

/// f − g for two step functions, on the union of their breakpoints.
fn step_difference(f: &TestFunction, g: &TestFunction) -> Result<TestFunction> {
    let (TestFunction::Elementary(a), TestFunction::Elementary(b)) = (f, g) else {
        return Err(invalid("step difference needs two elementary functions"));
    };
    let mut pts: Vec<f64> = a.iter().chain(b).flat_map(|s| [s.lo, s.hi]).collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    let steps = pts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Step { a: f.eval(mid) - g.eval(mid), lo: w[0], hi: w[1] }
        })
        .collect();
    TestFunction::elementary(steps)
}

/// ‖f − f_n‖_{𝒜₂} for the left-endpoint steps f_n on the cells [k/n, (k+1)/n).
fn step_gap(f: &TestFunction, steps: &LatticeSteps, h: f64, lambda: f64) -> Result<f64> {
    match f {
        TestFunction::Elementary(_) => Ok(a2_norm(&step_difference(f, &steps.to_test_function()?)?, h, lambda)?.value),
        TestFunction::Grid(g) => Ok(lattice_step_distance(Some(g), steps, h, lambda)?.value),
    }
}

/// Var(n^{−H} Σ_{k≥0} f(k/n) X_k) for ARTFIMA(0, α, λ/n, 0) innovations of
/// unit variance, against ‖f‖²_{𝒜₂}/Γ(α)².
///
/// Deterministic mode sums f(j/n) f(k/n) γ_{|j−k|} with the autocovariances
/// of the weight-sum route and cross-checks against the moving-average
/// representation Σ_m η_m². The tolerance applies to the last n. Condition A
/// diagnostics: ‖f − f_n‖_{𝒜₂} along `n_list` and ‖f_n⁺ − f_{n,m}⁺‖_{𝒜₂} along
/// a ladder of m at the last n.
pub fn weighted_sum_check(
    f: &TestFunction,
    alpha: f64,
    lambda: f64,
    n_list: &[usize],
    mode: WeightedMode,
    tol: f64,
    se_mult: f64,
) -> Result<ExperimentReport> {
    let Some((lo, hi)) = f.support() else {
        return Err(invalid("f vanishes identically"));
    };
    if lo < -1e-12 {
        return Err(invalid(format!("the weighted sum runs over k ≥ 0, but f is supported from {lo}; shift f onto [0, ∞)")));
    }
    if n_list.is_empty() {
        return Err(invalid("n_list is empty"));
    }
    let h = alpha + 0.5;
    let reference = a2_norm(f, h, lambda)?.value.powi(2) / gamma(alpha).powi(2);
    let mut rep = ExperimentReport::new("weighted sums").param("alpha", alpha).param("lambda", lambda);
    rep.note("f vanishes on (−∞, 0), so f_n⁻ = 0 and only the one-sided sum over k ≥ 0 enters");
    let mut gaps = Vec::new();
    let mut last_samples = Vec::new();
    for (i, &n) in n_list.iter().enumerate() {
        let nf = n as f64;
        let k_max = (hi * nf).floor() as usize;
        let samples: Vec<f64> = (0..=k_max).map(|k| f.eval(k as f64 / nf)).collect();
        let is_last = i + 1 == n_list.len();
        let scale = nf.powf(-2.0 * h);

        if mode == WeightedMode::Deterministic || !is_last {
            let model = ArtfimaModel::pure(alpha, lambda / nf, 1.0)?;
            let acvf = acvf_weight_sum(&model, k_max)?;
            let g = &acvf.values;
            let mut v = g[0] * samples.iter().map(|x| x * x).sum::<f64>();
            for lag in 1..=k_max {
                let a: f64 = samples[..=k_max - lag].iter().zip(&samples[lag..]).map(|(x, y)| x * y).sum();
                v += 2.0 * g[lag] * a;
            }
            v *= scale;
            rep.push(format!("n = {n}"), v, reference, (v / reference - 1.0).abs(), if is_last { tol } else { f64::INFINITY });
            if is_last {
                let eta = moving_average_weights(&samples, alpha, lambda, n)?;
                let alt = scale * eta.values.iter().map(|x| x * x).sum::<f64>();
                rep.relative(format!("n = {n}: autocovariance route vs moving-average route"), v, alt, 1e-8);
            }
        }
        if let (WeightedMode::MonteCarlo { paths, seed }, true) = (mode, is_last) {
            if paths < 100 {
                return Err(invalid(format!("need at least 100 paths, got {paths}")));
            }
            let eta = moving_average_weights(&samples, alpha, lambda, n)?;
            let draws = gaussian_functionals(std::slice::from_ref(&eta), paths, seed, nf.powf(-h));
            let (v, se) = covariance_with_se(&draws[0], &draws[0]);
            rep.push(format!("n = {n}: Monte Carlo variance vs limit [SE units]"), v, reference, (v - reference).abs() / se, se_mult);
            rep.note(format!("Monte Carlo with {paths} paths, seed {seed}: {v:.6e} ± {se:.3e}"));
            rep.seed = Some(seed);
        }

        let steps = LatticeSteps { start: 0.0, delta: 1.0 / nf, coeffs: samples.clone() };
        let gap = step_gap(f, &steps, h, lambda)?;
        rep.push(format!("‖f − f_n‖_A2 at n = {n}"), gap, 0.0, 0.0, f64::INFINITY);
        gaps.push(gap);
        if is_last {
            last_samples = samples;
        }
    }
    let fnorm = reference.sqrt() * gamma(alpha);
    let negligible = gaps.iter().all(|&d| d <= 1e-12 * fnorm);
    rep.check("Condition A: ‖f − f_n‖_A2 decreasing along n", negligible || gaps.windows(2).all(|w| w[1] < w[0]));
    if negligible {
        rep.note("f is a step function on every lattice, so f_n = f");
    }

    let n = *n_list.last().unwrap();
    let k_max = last_samples.len() - 1;
    let ladder: Vec<usize> = (1..=4).map(|q| k_max * q / 4).collect();
    let mut tails = Vec::new();
    for &m in &ladder {
        let tail = &last_samples[(m + 1).min(last_samples.len())..];
        let d = if tail.iter().all(|&c| c == 0.0) {
            0.0
        } else {
            let steps = LatticeSteps { start: (m + 1) as f64 / n as f64, delta: 1.0 / n as f64, coeffs: tail.to_vec() };
            lattice_step_distance(None, &steps, h, lambda)?.value
        };
        rep.push(format!("‖f_n⁺ − f_(n,m)⁺‖_A2 at n = {n}, m = {m}"), d, 0.0, 0.0, f64::INFINITY);
        tails.push(d);
    }
    rep.check("Condition A: ‖f_n⁺ − f_(n,m)⁺‖_A2 non-increasing in m", tails.windows(2).all(|w| w[1] <= w[0]));
    Ok(rep)
}

/// η_m = Σ_k f_k ω_{k−m}, so that Σ_k f_k X_k = Σ_m η_m Z_m.
fn moving_average_weights(samples: &[f64], alpha: f64, lambda: f64, n: usize) -> Result<XiTable> {
    let s = PartialSumScheme::new(alpha, lambda, n, CoeffKind::Artfima)?;
    let w = s.coefficients();
    let k = samples.len() - 1;
    let rev: Vec<f64> = samples.iter().rev().copied().collect();
    // (ω ∗ f_rev)_q = η_{K−q}.
    let conv = convolve(w, &rev, w.len() + k);
    let values: Vec<f64> = conv.into_iter().rev().collect();
    Ok(XiTable { m_lo: k as i64 - (values.len() as i64 - 1), values })
}
