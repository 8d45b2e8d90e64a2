use tfts::grid::GridFunction;
use tfts::limits::*;
use tfts::wiener::TestFunction;

#[test]
fn variance_limit_artfima_kind_converges_at_rate_one_over_n() {
    let rep = limit_variance_check(0.3, 1.0, CoeffKind::Artfima, 1.0, &[1024, 2048, 4096], 2e-4).unwrap();
    assert!(rep.pass, "{rep:#?}");
    // Reference errors from the numpy oracle: 2.98e-4, 1.48e-4, 7.39e-5.
    let last = rep.rows[2].error;
    assert!((last / 7.385e-5 - 1.0).abs() < 0.02, "{last:e}");
}

#[test]
fn variance_limit_power_law_kind() {
    // Oracle signed errors at n = 4096: −0.16823 (α = 0.3), −0.029814 (α = 0.5), −0.0034710 (α = 0.7, λ = 0.5, t = 0.5).
    for (a, l, t, expect) in [(0.3, 1.0, 1.0, 0.168_234), (0.5, 1.0, 1.0, 0.029_813_8), (0.7, 0.5, 0.5, 0.003_471_04)] {
        let rep = limit_variance_check(a, l, CoeffKind::PowerLaw, t, &[1024, 2048, 4096], 1.0).unwrap();
        assert!(rep.pass);
        let e = rep.rows[2].error;
        assert!((e / expect - 1.0).abs() < 1e-3, "α={a}: {e}");
    }
}

#[test]
fn zero_time_is_trivial() {
    let rep = limit_variance_check(0.4, 1.0, CoeffKind::PowerLaw, 0.0, &[64], 1e-15).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.rows[0].computed, 0.0);
}

#[test]
fn fdd_single_time_reduces_to_variance() {
    let f = fdd_covariance_check(0.6, 1.0, CoeffKind::PowerLaw, &[1.0], 512, 1.0, 1e-12).unwrap();
    let v = limit_variance_check(0.6, 1.0, CoeffKind::PowerLaw, 1.0, &[512], 1.0).unwrap();
    assert_eq!(f.rows[0].computed, v.rows[0].computed);
}

#[test]
fn fdd_polarization_is_exact() {
    let rep = fdd_covariance_check(0.5, 1.0, CoeffKind::Artfima, &[0.25, 0.5, 1.0], 1024, 2e-3, 1e-12).unwrap();
    assert!(rep.pass, "{rep:#?}");
}

#[test]
fn tightness_ratios_are_bounded() {
    let pairs: Vec<(f64, f64)> = (0..16).map(|k| (k as f64 / 16.0, (k + 1) as f64 / 16.0)).collect();
    let rep = tightness_probe(0.5, 1.0, CoeffKind::PowerLaw, &pairs, &[256, 1024], 10.0, 0.2).unwrap();
    assert!(rep.pass);
    let rep = tightness_probe(0.5, 1.0, CoeffKind::PowerLaw, &[(0.5, 0.5)], &[64], 10.0, 0.2).unwrap();
    assert!(rep.notes.iter().any(|n| n.contains("degenerate")));
}

#[test]
fn sandwich_threshold() {
    let (n_eps, rep) = sandwich_check(0.5, 1.0, 1024, 0.01).unwrap();
    assert!(rep.pass);
    // |Γ(j+½)/(Γ(j+1)·j^{−½}) − 1| first stays below 1e-2 after j = 12 (mpmath).
    assert_eq!(n_eps, 12);
    let (n_one, _) = sandwich_check(1.0, 1.0, 64, 0.01).unwrap();
    assert_eq!(n_one, 0);
}

#[test]
fn mc_matches_prelimit_and_is_reproducible() {
    let a = invariance_mc(0.6, 1.0, CoeffKind::Artfima, &[0.5, 1.0], 64, 4000, 11, 4.0, 0.01).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let z = (a.empirical[i][j] - a.prelimit[i][j]).abs() / a.std_error[i][j];
            assert!(z < 4.0, "({i},{j}): {z}");
        }
    }
    let b = invariance_mc(0.6, 1.0, CoeffKind::Artfima, &[0.5, 1.0], 64, 4000, 11, 4.0, 0.01).unwrap();
    assert_eq!(a.empirical, b.empirical);
}

#[test]
fn quadrupling_paths_halves_the_standard_error() {
    let se = |paths| invariance_mc(0.5, 1.0, CoeffKind::PowerLaw, &[1.0], 64, paths, 3, 4.0, 0.01).unwrap().std_error[0][0];
    let r = se(8000) / se(2000);
    assert!((r / 0.5 - 1.0).abs() < 0.2, "{r}");
}

#[test]
fn weighted_indicator_matches_fdd_variance() {
    let f = TestFunction::indicator(0.0, 1.0).unwrap();
    let rep = weighted_sum_check(&f, 0.4, 1.0, &[256, 512], WeightedMode::Deterministic, 2e-3, 4.0).unwrap();
    assert!(rep.pass, "{rep:#?}");
    let fdd = fdd_covariance_check(0.4, 1.0, CoeffKind::Artfima, &[1.0], 512, 1.0, 1e-12).unwrap();
    // Same sum of one-sided moving averages, shifted by one index.
    let v = rep.rows.iter().find(|r| r.label == "n = 512").unwrap().computed;
    assert!((v / fdd.rows[0].computed - 1.0).abs() < 1e-9, "{v} vs {}", fdd.rows[0].computed);
}

#[test]
fn weighted_rejects_negative_support() {
    let f = TestFunction::indicator(-1.0, 1.0).unwrap();
    assert!(weighted_sum_check(&f, 0.4, 1.0, &[64], WeightedMode::Deterministic, 0.02, 4.0).is_err());
}

#[test]
fn weighted_bump_monte_carlo() {
    let g = GridFunction::from_fn(0.0, 1.0 / 1024.0, 2049, |x| (-(x - 1.0).powi(2) / (2.0 * 0.12 * 0.12)).exp()).unwrap();
    let f = TestFunction::grid(g).unwrap();
    let rep = weighted_sum_check(&f, 0.4, 1.0, &[128, 256], WeightedMode::MonteCarlo { paths: 2000, seed: 5 }, 0.02, 4.0).unwrap();
    assert!(rep.pass, "{rep:#?}");
}
