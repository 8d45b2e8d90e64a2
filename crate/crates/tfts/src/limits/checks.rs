use super::scheme::{xi_diff, xi_dot, CoeffKind, PartialSumScheme, XiTable};
use crate::error::{domain, invalid, Result};
use crate::report::ExperimentReport;
use crate::specfun::gamma;
use crate::stats::ols_slope;
use crate::thp::{thp_covariance, CovMethod, ThpParams};
use std::collections::BTreeMap;

/// R_{H,λ}(t, s)/Γ(α)² with H = α + ½ and σ = 1: the covariance of the limit
/// of n^{−H}S(nt) for unit-variance innovations.
pub fn limit_covariance(alpha: f64, lambda: f64, t: f64, s: f64) -> Result<f64> {
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let p = ThpParams::new(alpha + 0.5, lambda, 1.0)?;
    Ok(thp_covariance(&p, t, s, CovMethod::KernelL2)? / gamma(alpha).powi(2))
}

fn kind_label(kind: CoeffKind) -> &'static str {
    match kind {
        CoeffKind::PowerLaw => "power_law",
        CoeffKind::Artfima => "artfima",
    }
}

/// n^{−2H} Σ_m ξ_m(nt)² against its limit along `n_list`.
///
/// The tolerance applies to the last n; earlier rows are the convergence
/// curve. Also checks that |error| decreases along the list and that its
/// log-log slope is negative.
pub fn limit_variance_check(alpha: f64, lambda: f64, kind: CoeffKind, t: f64, n_list: &[usize], tol: f64) -> Result<ExperimentReport> {
    if n_list.is_empty() {
        return Err(invalid("n_list is empty"));
    }
    if !(t >= 0.0) {
        return Err(domain(format!("need t ≥ 0, got {t}")));
    }
    let mut rep = ExperimentReport::new(format!("partial-sum variance limit ({})", kind_label(kind)))
        .param("alpha", alpha)
        .param("lambda", lambda)
        .param("t", t);
    let reference = limit_covariance(alpha, lambda, t, t)?;
    let mut errs = Vec::new();
    for (i, &n) in n_list.iter().enumerate() {
        let s = PartialSumScheme::new(alpha, lambda, n, kind)?;
        let tab = s.xi_table(t)?;
        let lhs = (n as f64).powf(-2.0 * s.h()) * xi_dot(&tab, &tab);
        let err = if reference == 0.0 { lhs.abs() } else { lhs / reference - 1.0 };
        let row_tol = if i + 1 == n_list.len() { tol } else { f64::INFINITY };
        rep.push(format!("n = {n}"), lhs, reference, err.abs(), row_tol);
        errs.push((n, err));
    }
    if t > 0.0 && errs.len() > 1 {
        rep.check("|error| decreasing in n", errs.windows(2).all(|w| w[1].1.abs() < w[0].1.abs()));
        let x: Vec<f64> = errs.iter().map(|e| (e.0 as f64).ln()).collect();
        let y: Vec<f64> = errs.iter().map(|e| e.1.abs().max(1e-300).ln()).collect();
        let slope = ols_slope(&x, &y);
        rep.check(format!("log-log error slope {slope:.4} < 0"), slope < 0.0);
        let below = errs.iter().all(|e| e.1 <= 0.0);
        let above = errs.iter().all(|e| e.1 >= 0.0);
        rep.note(format!(
            "signed relative errors {:?}; approach from {}",
            errs.iter().map(|e| e.1).collect::<Vec<_>>(),
            if below {
                "below"
            } else if above {
                "above"
            } else {
                "both sides"
            }
        ));
    }
    Ok(rep)
}

/// The p × p matrix n^{−2H} Σ_m ξ_m(nt_i) ξ_m(nt_j) against R(t_i, t_j)/Γ(α)².
///
/// Both sides are centred Gaussian families, so agreement of second moments
/// is agreement of finite-dimensional distributions.
pub fn fdd_covariance_check(
    alpha: f64,
    lambda: f64,
    kind: CoeffKind,
    t_list: &[f64],
    n: usize,
    tol: f64,
    polarization_tol: f64,
) -> Result<ExperimentReport> {
    validate_times(t_list)?;
    let s = PartialSumScheme::new(alpha, lambda, n, kind)?;
    let scale = (n as f64).powf(-2.0 * s.h());
    let tabs: Vec<XiTable> = t_list.iter().map(|&t| s.xi_table(t)).collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(format!("fdd covariance ({})", kind_label(kind)))
        .param("alpha", alpha)
        .param("lambda", lambda)
        .param("n", n as f64);
    rep.note("prelimit and limit are centred Gaussian, so covariance agreement is fdd agreement");
    for i in 0..t_list.len() {
        for j in i..t_list.len() {
            let c = scale * xi_dot(&tabs[i], &tabs[j]);
            let r = limit_covariance(alpha, lambda, t_list[i], t_list[j])?;
            rep.relative(format!("Cov(t={}, t={})", t_list[i], t_list[j]), c, r, tol);
            if i != j {
                let sum = xi_sum(&tabs[i], &tabs[j]);
                let dif = xi_diff(&tabs[i], &tabs[j]);
                let pol = 0.25 * scale * (xi_dot(&sum, &sum) - xi_dot(&dif, &dif));
                let norm = scale * (xi_dot(&tabs[i], &tabs[i]) * xi_dot(&tabs[j], &tabs[j])).sqrt();
                rep.push(format!("polarization at (t={}, t={})", t_list[i], t_list[j]), pol, c, (pol - c).abs() / norm, polarization_tol);
            }
        }
    }
    Ok(rep)
}

fn xi_sum(a: &XiTable, b: &XiTable) -> XiTable {
    let lo = a.m_lo.min(b.m_lo);
    let hi = a.m_hi().max(b.m_hi());
    XiTable { m_lo: lo, values: (lo..=hi).map(|m| a.get(m) + b.get(m)).collect() }
}

fn validate_times(t_list: &[f64]) -> Result<()> {
    if t_list.is_empty() {
        return Err(invalid("t_list is empty"));
    }
    if t_list.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(domain("times must be finite and nonnegative"));
    }
    for (i, a) in t_list.iter().enumerate() {
        if t_list[..i].contains(a) {
            return Err(invalid(format!("time {a} is repeated")));
        }
    }
    Ok(())
}

/// n^{−2H} Σ_m (ξ_m(nt₂) − ξ_m(nt₁))² / |t₂ − t₁|^{2H} for each pair and n.
///
/// Passes when max/min over all cells is at most `max_spread` and the ratio
/// of every pair moves by at most `stability` between the last two n.
pub fn tightness_probe(
    alpha: f64,
    lambda: f64,
    kind: CoeffKind,
    pairs: &[(f64, f64)],
    n_list: &[usize],
    max_spread: f64,
    stability: f64,
) -> Result<ExperimentReport> {
    for &(a, b) in pairs {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(domain(format!("pairs need 0 ≤ t₁ ≤ t₂ ≤ 1, got ({a}, {b})")));
        }
    }
    if n_list.is_empty() {
        return Err(invalid("n_list is empty"));
    }
    let mut rep = ExperimentReport::new(format!("tightness probe ({})", kind_label(kind))).param("alpha", alpha).param("lambda", lambda);
    let h = alpha + 0.5;
    let mut ratios: Vec<Vec<Option<f64>>> = Vec::new();
    for &n in n_list {
        let s = PartialSumScheme::new(alpha, lambda, n, kind)?;
        let mut cache: BTreeMap<u64, XiTable> = BTreeMap::new();
        let mut row = Vec::new();
        for &(a, b) in pairs {
            if a == b {
                row.push(None);
                continue;
            }
            for t in [a, b] {
                if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(t.to_bits()) {
                    e.insert(s.xi_table(t)?);
                }
            }
            let d = xi_diff(&cache[&b.to_bits()], &cache[&a.to_bits()]);
            let r = xi_dot(&d, &d) / (n as f64).powf(2.0 * h) / (b - a).powf(2.0 * h);
            rep.push(format!("n = {n}, ({a}, {b})"), r, 0.0, 0.0, f64::INFINITY);
            row.push(Some(r));
        }
        ratios.push(row);
    }
    for (k, &(a, b)) in pairs.iter().enumerate() {
        if a == b {
            rep.note(format!("pair ({a}, {b}) is degenerate and skipped"));
            continue;
        }
        if ratios.len() > 1 {
            let last = ratios[ratios.len() - 1][k].unwrap();
            let prev = ratios[ratios.len() - 2][k].unwrap();
            rep.push(
                format!("ratio change n = {} → {} at ({a}, {b})", n_list[n_list.len() - 2], n_list[n_list.len() - 1]),
                last,
                prev,
                (last / prev - 1.0).abs(),
                stability,
            );
        }
    }
    let all: Vec<f64> = ratios.iter().flatten().flatten().copied().collect();
    if !all.is_empty() {
        let (lo, hi) = all.iter().fold((f64::INFINITY, 0.0f64), |(l, u), &v| (l.min(v), u.max(v)));
        rep.push("max/min ratio over all pairs and n", hi / lo, max_spread, hi / lo, max_spread);
        rep.note(format!("ratios lie in [{lo:.6}, {hi:.6}]"));
    }
    Ok(rep)
}

/// The first index N(ε) after which (1−ε)C_j < ω_j < (1+ε)C_j for every
/// computed j, with both coefficient families at tempering λ/n.
pub fn sandwich_check(alpha: f64, lambda: f64, n: usize, eps: f64) -> Result<(usize, ExperimentReport)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("need 0 < ε < 1, got {eps}")));
    }
    let p = PartialSumScheme::new(alpha, lambda, n, CoeffKind::PowerLaw)?;
    let a = PartialSumScheme::new(alpha, lambda, n, CoeffKind::Artfima)?;
    let jmax = p.truncation().min(a.truncation());
    let mut last_bad = 0usize;
    let mut dev = Vec::with_capacity(jmax);
    for j in 1..=jmax {
        let r = a.coefficients()[j] / p.coefficients()[j];
        dev.push((r - 1.0).abs());
        if !((1.0 - eps) < r && r < (1.0 + eps)) {
            last_bad = j;
        }
    }
    let mut rep = ExperimentReport::new("ARTFIMA weight sandwich")
        .param("alpha", alpha)
        .param("lambda", lambda)
        .param("n", n as f64)
        .param("eps", eps);
    rep.check(format!("N(ε) = {last_bad} below the common truncation {jmax}"), last_bad < jmax);
    rep.check("|ω_j/C_j − 1| non-increasing past N(ε)", dev[last_bad..].windows(2).all(|w| w[1] <= w[0] + 1e-10));
    rep.note(format!(
        "N(ε) = {last_bad}; Stirling estimate |α(α−1)|/(2ε) = {:.3}; |ω_J/C_J − 1| = {:.3e} at J = {jmax}",
        (alpha * (alpha - 1.0)).abs() / (2.0 * eps),
        dev.last().copied().unwrap_or(0.0)
    ));
    Ok((last_bad, rep))
}
