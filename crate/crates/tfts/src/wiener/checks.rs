use super::{a1_inner, a2_inner, lattice_step_distance, LatticeSteps, Step, TestFunction};
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::quad::gl20;
use crate::report::ExperimentReport;
use crate::specfun::gamma;
use crate::stats::ols_slope;
use crate::tfcalc::IntegralBackend;

/// Smooth transition from 0 at u ≤ 0 to 1 at u ≥ 1.
fn smooth_step(u: f64) -> f64 {
    let psi = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    let (a, b) = (psi(u), psi(1.0 - u));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Step functions and grid functions used for the Plancherel comparison.
pub fn plancherel_test_set() -> Result<Vec<(String, TestFunction)>> {
    let st = |a, lo, hi| Step { a, lo, hi };
    let h = 1.0 / 64.0;
    let grid = |f: &dyn Fn(f64) -> f64| -> Result<TestFunction> {
        TestFunction::grid(GridFunction::from_fn(-12.0, h, 1537, |x| {
            let v = f(x);
            if v.abs() < 1e-300 {
                0.0
            } else {
                v
            }
        })?)
    };
    Ok(vec![
        ("1[0,1)".into(), TestFunction::indicator(0.0, 1.0)?),
        ("1[1,2)".into(), TestFunction::indicator(1.0, 2.0)?),
        ("three steps".into(), TestFunction::elementary(vec![st(0.5, -1.0, 0.0), st(-2.0, 0.0, 0.3), st(1.0, 0.7, 2.0)])?),
        ("gaussian".into(), grid(&|x| (-x * x).exp())?),
        ("compact bump".into(), grid(&|x| if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 })?),
        ("modulated gaussian".into(), grid(&|x| (3.0 * x).cos() * (-0.5 * x * x).exp())?),
        ("truncated power tail".into(), grid(&|x| (1.0 + x * x).powf(-0.75) * smooth_step((10.0 - x.abs()) / 4.0))?),
    ])
}

/// 𝒜₁ against 𝒜₂ on the standard test set.
///
/// The error of a pair is |a₁ − a₂| / (‖f‖‖g‖), the relative error for f = g.
/// Also records Cauchy–Schwarz and the bound ‖f‖²_{𝒜₂} ≤ Γ(H−½)² λ^{1−2H} ‖f‖²₂.
pub fn plancherel_check(h: f64, lambda: f64, backend: IntegralBackend, tol: f64) -> Result<ExperimentReport> {
    let set = plancherel_test_set()?;
    let mut rep = ExperimentReport::new("wiener plancherel").param("H", h).param("lambda", lambda);
    let pairs: Vec<(usize, usize)> = vec![(0, 0), (0, 1), (2, 2), (0, 2), (1, 2), (3, 3), (4, 4), (5, 5), (6, 6), (3, 6), (4, 5)];
    let mut diag = vec![None; set.len()];
    for &(i, j) in &pairs {
        for k in [i, j] {
            if diag[k].is_none() {
                diag[k] = Some(a2_inner(&set[k].1, &set[k].1, h, lambda)?.value);
            }
        }
    }
    let g2 = gamma(h - 0.5).powi(2);
    for (k, (name, f)) in set.iter().enumerate() {
        if let Some(n2) = diag[k] {
            let bound = g2 * lambda.powf(1.0 - 2.0 * h) * f.l2_norm().powi(2);
            rep.check(format!("‖{name}‖²_A2 = {n2:.6e} ≤ {bound:.6e}"), n2 <= bound);
        }
    }
    for &(i, j) in &pairs {
        let (nf, f) = &set[i];
        let (ng, g) = &set[j];
        let a2 = a2_inner(f, g, h, lambda)?.value;
        let a1 = a1_inner(f, g, h, lambda, backend)?.value;
        let scale = (diag[i].unwrap() * diag[j].unwrap()).sqrt();
        rep.push(format!("<{nf}, {ng}>"), a1, a2, (a1 - a2).abs() / scale, tol);
        if i != j {
            rep.check(format!("Cauchy–Schwarz <{nf}, {ng}>"), a2 * a2 <= diag[i].unwrap() * diag[j].unwrap());
        }
    }
    Ok(rep)
}

/// The sequence f̂_n(ω) = |ω|^{−1/2} 1_{1<|ω|<n}: Cauchy in 𝒜₂ but with
/// ‖f_n‖²_{L²} = 2 ln n unbounded.
pub fn non_completeness_witness(h: f64, lambda: f64, ns: &[f64]) -> Result<ExperimentReport> {
    if ns.len() < 2 || ns.iter().any(|&n| !(n > 1.0)) {
        return Err(invalid("the witness needs at least two cut-offs above 1"));
    }
    let g2 = gamma(h - 0.5).powi(2);
    let l2 = lambda * lambda;
    // ∫_a^b ω^{−1} w(ω) dω in s = ln ω, panels of width ≤ 1/4.
    let weighted = |a: f64, b: f64, with_weight: bool| {
        let (sa, sb) = (a.ln(), b.ln());
        let panels = ((sb - sa) * 4.0).ceil().max(1.0) as usize;
        let step = (sb - sa) / panels as f64;
        (0..panels)
            .map(|i| {
                gl20().integrate(sa + i as f64 * step, sa + (i + 1) as f64 * step, |s| {
                    if with_weight {
                        (l2 + (2.0 * s).exp()).powf(0.5 - h)
                    } else {
                        1.0
                    }
                })
            })
            .sum::<f64>()
    };
    let mut rep = ExperimentReport::new("wiener non-completeness witness").param("H", h).param("lambda", lambda);
    let mut l2_norms = Vec::new();
    let mut cauchy = Vec::new();
    for &n in ns {
        let l2n = 2.0 * weighted(1.0, n, false);
        rep.relative(format!("‖f_{n}‖²_L2 vs 2 ln n"), l2n, 2.0 * n.ln(), 1e-12);
        l2_norms.push(l2n.sqrt());
        let d2 = 2.0 * g2 * weighted(n, 10.0 * n, true);
        let bound = 2.0 * g2 * n.powf(1.0 - 2.0 * h) / (2.0 * h - 1.0);
        rep.check(format!("‖f_{} − f_{n}‖²_A2 = {d2:.6e} ≤ {bound:.6e}", 10.0 * n), d2 <= bound);
        cauchy.push(d2.sqrt());
    }
    rep.check("‖f_10n − f_n‖_A2 strictly decreasing", cauchy.windows(2).all(|w| w[1] < w[0]));
    rep.check("‖f_n‖_L2 strictly increasing", l2_norms.windows(2).all(|w| w[1] > w[0]));
    let r_l2 = l2_norms[l2_norms.len() - 1] / l2_norms[0];
    let r_a2 = cauchy[cauchy.len() - 1] / cauchy[0];
    rep.note(format!(
        "over n = {} … {}: ‖f_n‖_L2 grows by a factor {r_l2:.4}, ‖f_10n − f_n‖_A2 shrinks by a factor {r_a2:.4e}",
        ns[0],
        ns[ns.len() - 1]
    ));
    Ok(rep)
}

/// ‖f − f_n‖_{𝒜₂} for left-endpoint step approximations on the lattices δ = 1/n.
///
/// Passes when the distance decreases along `ns` and the fitted log-log
/// slope is at most −½.
pub fn density_check(f: &GridFunction, h: f64, lambda: f64, ns: &[usize]) -> Result<ExperimentReport> {
    let tf = TestFunction::grid(f.clone())?;
    let mut rep = ExperimentReport::new("wiener step-function density").param("H", h).param("lambda", lambda);
    let mut d = Vec::new();
    for &n in ns {
        let delta = 1.0 / n as f64;
        let start = (f.origin / delta).floor() * delta;
        let count = ((f.end() - start) / delta).ceil() as usize + 1;
        let steps = LatticeSteps::sample(&tf, start, delta, count);
        let e = lattice_step_distance(Some(f), &steps, h, lambda)?;
        rep.push(format!("‖f − f_{n}‖_A2"), e.value, 0.0, e.est_error / e.value, 1e-3);
        d.push(e.value);
    }
    rep.check("distance decreasing in n", d.windows(2).all(|w| w[1] < w[0]));
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let slope = ols_slope(&x, &y);
    rep.push("log-log slope", slope, -0.5, (slope + 0.5).max(0.0), 0.0);
    Ok(rep)
}
