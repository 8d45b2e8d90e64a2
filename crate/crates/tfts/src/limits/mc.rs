use super::checks::limit_covariance;
use super::scheme::{xi_dot, CoeffKind, PartialSumScheme, XiTable};
use crate::error::{invalid, Result};
use crate::report::ExperimentReport;
use crate::rng::PhiloxStream;
use crate::stats::{covariance_with_se, ks_normal};
use rayon::prelude::*;

/// Draws of Σ_m a_m Z_m for several weight tables sharing one i.i.d. N(0, 1)
/// sequence per path. Path p reads Philox stream p of `seed`, and the result
/// is indexed [table][path] independently of the thread count.
pub fn gaussian_functionals(tables: &[XiTable], n_paths: usize, seed: u64, scale: f64) -> Vec<Vec<f64>> {
    if tables.is_empty() {
        return Vec::new();
    }
    let lo = tables.iter().map(|t| t.m_lo).min().unwrap();
    let hi = tables.iter().map(|t| t.m_hi()).max().unwrap();
    let len = (hi - lo + 1) as usize;
    let per_path: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut z = vec![0.0; len];
            PhiloxStream::new(seed, p as u64).fill_normal(&mut z);
            tables
                .iter()
                .map(|t| {
                    let off = (t.m_lo - lo) as usize;
                    scale * t.values.iter().zip(&z[off..]).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect()
        })
        .collect();
    (0..tables.len()).map(|i| per_path.iter().map(|row| row[i]).collect()).collect()
}

/// Empirical covariances with standard errors, the limit covariance and the
/// prelimit (exact second moment at this n).
#[derive(Debug, Clone)]
pub struct McOutcome {
    pub report: ExperimentReport,
    pub t_list: Vec<f64>,
    pub empirical: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
    pub limit: Vec<Vec<f64>>,
    pub prelimit: Vec<Vec<f64>>,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
}

/// Simulates n^{−H}S(nt) on `t_list` and compares with the limit covariance.
///
/// Every entry must lie within `se_mult` standard errors of the limit and the
/// marginal at max(t_list) must pass KS against its limiting normal law at
/// level `ks_level`. Both coefficient kinds share the representation
/// S(nt) = Σ_m ξ_m(nt) Z_m.
#[allow(clippy::too_many_arguments)]
pub fn invariance_mc(
    alpha: f64,
    lambda: f64,
    kind: CoeffKind,
    t_list: &[f64],
    n: usize,
    n_paths: usize,
    seed: u64,
    se_mult: f64,
    ks_level: f64,
) -> Result<McOutcome> {
    if n_paths < 100 {
        return Err(invalid(format!("need at least 100 paths, got {n_paths}")));
    }
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(invalid("times must be positive"));
    }
    let s = PartialSumScheme::new(alpha, lambda, n, kind)?;
    let tabs: Vec<XiTable> = t_list.iter().map(|&t| s.xi_table(t)).collect::<Result<_>>()?;
    let scale = (n as f64).powf(-s.h());
    let draws = gaussian_functionals(&tabs, n_paths, seed, scale);

    let p = t_list.len();
    let mut rep = ExperimentReport::new(format!(
        "invariance principle Monte Carlo ({})",
        match kind {
            CoeffKind::PowerLaw => "power_law",
            CoeffKind::Artfima => "artfima",
        }
    ))
    .param("alpha", alpha)
    .param("lambda", lambda)
    .param("n", n as f64)
    .param("paths", n_paths as f64);
    rep.seed = Some(seed);
    let mut out = McOutcome {
        report: ExperimentReport::new(""),
        t_list: t_list.to_vec(),
        empirical: vec![vec![0.0; p]; p],
        std_error: vec![vec![0.0; p]; p],
        limit: vec![vec![0.0; p]; p],
        prelimit: vec![vec![0.0; p]; p],
        ks_statistic: 0.0,
        ks_p_value: 0.0,
    };
    for i in 0..p {
        for j in i..p {
            let (c, se) = covariance_with_se(&draws[i], &draws[j]);
            let r = limit_covariance(alpha, lambda, t_list[i], t_list[j])?;
            let pre = scale * scale * xi_dot(&tabs[i], &tabs[j]);
            let label = format!("Cov(t={}, t={})", t_list[i], t_list[j]);
            rep.push(format!("{label} vs limit [SE units]"), c, r, (c - r).abs() / se, se_mult);
            rep.push(format!("{label} vs prelimit [SE units]"), c, pre, (c - pre).abs() / se, f64::INFINITY);
            rep.note(format!("{label}: empirical {c:.6e} ± {se:.3e}, limit {r:.6e}, prelimit {pre:.6e}"));
            for (a, b) in [(i, j), (j, i)] {
                out.empirical[a][b] = c;
                out.std_error[a][b] = se;
                out.limit[a][b] = r;
                out.prelimit[a][b] = pre;
            }
        }
    }
    let last = t_list.iter().enumerate().fold(0, |k, (i, t)| if *t > t_list[k] { i } else { k });
    let (d, pv) = ks_normal(&draws[last], out.limit[last][last]);
    rep.push(format!("KS p-value at t = {} against the limit law", t_list[last]), pv, ks_level, d, f64::INFINITY);
    rep.check(format!("KS p-value {pv:.4} > {ks_level}"), pv > ks_level);
    rep.note(format!("path p draws its innovations from Philox stream p of seed {seed}"));
    out.ks_statistic = d;
    out.ks_p_value = pv;
    out.report = rep;
    Ok(out)
}
