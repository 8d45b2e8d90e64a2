use tfts::stats::{mean_var, ols_slope, variance_standard_error};
use tfts::thp::*;

#[test]
fn three_methods_agree_on_the_grid() {
    for h in [0.6, 0.8, 1.2, 1.7] {
        for lam in [0.2, 1.0, 3.0] {
            let p = ThpParams::new(h, lam, 1.0).unwrap();
            let tol = if h <= 1.5 { 1e-6 } else { 1e-4 };
            for (t, s) in [(1.0, 1.0), (2.0, 1.0), (0.5, 0.25)] {
                let b = thp_covariance(&p, t, s, CovMethod::Bessel).unwrap();
                let k = thp_covariance(&p, t, s, CovMethod::KernelL2).unwrap();
                let sp = thp_covariance(&p, t, s, CovMethod::Spectral).unwrap();
                assert!((b / sp - 1.0).abs() <= tol && (k / sp - 1.0).abs() <= tol, "H={h} λ={lam} ({t}, {s})");
            }
        }
    }
}

#[test]
fn bessel_constant_is_half_the_printed_prefactor() {
    assert!((bessel_calibration_constant() - 0.5).abs() < 1e-10);
}

#[test]
fn scaling_law() {
    for (h, lam) in [(0.7, 0.5), (1.7, 1.0)] {
        let p = ThpParams::new(h, lam, 1.0).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let rep = scaling_check(&p, c, &[(1.0, 1.0), (1.0, 0.5), (0.3, 2.0)], CovMethod::Spectral).unwrap();
            assert!(rep.pass, "{:?}", rep.rows);
            let rep = scaling_check(&p, c, &[(1.0, 0.5)], CovMethod::Bessel).unwrap();
            assert!(rep.pass, "{:?}", rep.rows);
        }
    }
}

#[test]
fn increments_are_stationary() {
    for m in [CovMethod::Spectral, CovMethod::KernelL2] {
        let p = ThpParams::new(0.8, 0.6, 1.0).unwrap();
        let rep = increment_stationarity_check(&p, 0.4, &[0.1, 1.0, 3.7], m).unwrap();
        assert!(rep.pass, "{m:?}: {:?}", rep.rows);
    }
}

#[test]
fn kolmogorov_five_thirds() {
    let p = ThpParams::new(4.0 / 3.0, 1e-3, 1.0).unwrap();
    let (lo, hi) = (1e-2f64, 0.5f64);
    let x: Vec<f64> = (0..200).map(|i| lo.ln() + (hi / lo).ln() * i as f64 / 199.0).collect();
    let y: Vec<f64> = x.iter().map(|l| thn_spectral_density(&p, l.exp(), ThnFlavor::Continuous, 0).unwrap().value.ln()).collect();
    let slope = ols_slope(&x, &y);
    assert!((slope + 5.0 / 3.0).abs() <= 0.02, "{slope}");
}

#[test]
fn increment_density_integrates_to_the_variance() {
    for (h, lam) in [(0.7, 0.5), (1.2, 1.0), (4.0 / 3.0, 0.1)] {
        let p = ThpParams::new(h, lam, 1.3).unwrap();
        let (total, bound) = continuous_density_integral(&p);
        let v = variance(&p, 1.0, CovMethod::Bessel).unwrap();
        assert!((total / v - 1.0).abs() <= 1e-6, "H={h}: {total} vs {v}");
        assert!(bound <= 1e-4 * v);
    }
}

#[test]
fn covariance_matrices_factor_cleanly() {
    let p = ThpParams::new(0.75, 0.5, 1.0).unwrap();
    let times: Vec<f64> = (1..=64).map(|i| i as f64 / 16.0).collect();
    let c = CovarianceMatrix::new(&p, &times, CovMethod::Spectral).unwrap();
    assert!(c.jitter_used <= 1e-10);
    assert!(c.reconstruction_error() <= 1e-10);
}

#[test]
fn synthesized_paths() {
    let p = ThpParams::new(0.8, 1.0, 1.0).unwrap();
    let a = synthesize_path(&p, 32, 1.0, 11, 0).unwrap();
    assert_eq!(a.samples[0], 0.0);
    assert_eq!(a, synthesize_path(&p, 32, 1.0, 11, 0).unwrap());
    assert_ne!(a, synthesize_path(&p, 32, 1.0, 11, 1).unwrap());

    let times: Vec<f64> = (1..=32).map(|i| i as f64 / 32.0).collect();
    let cov = CovarianceMatrix::new(&p, &times, CovMethod::Spectral).unwrap();
    let ends: Vec<f64> = (0..10_000).map(|k| *path_from(&cov, 1.0 / 32.0, 11, k).samples.last().unwrap()).collect();
    let (_, v) = mean_var(&ends);
    let r = thp_covariance(&p, 1.0, 1.0, CovMethod::Spectral).unwrap();
    assert!((v - r).abs() <= 4.0 * variance_standard_error(&ends), "{v} vs {r}");
}

#[test]
fn matern_integral_reproduces_the_covariance() {
    for h in [1.5, 1.7] {
        let p = ThpParams::new(h, 0.8, 1.0).unwrap();
        let rep = matern_decomposition_check(&p, &[(1.0, 1.0), (1.0, 0.5)], 1.0 / 512.0, MaternMode::Deterministic, 0.01).unwrap();
        assert!(rep.pass, "{:?}", rep.rows);
        let rep = matern_decomposition_check(&p, &[(1.0, 1.0)], 1.0 / 512.0, MaternMode::Stochastic { seed: 4 }, 0.01).unwrap();
        assert!(rep.pass, "{:?}", rep.rows);
    }
    assert!(
        matern_decomposition_check(&ThpParams::new(0.9, 0.8, 1.0).unwrap(), &[(1.0, 1.0)], 0.01, MaternMode::Deterministic, 0.01).is_err()
    );
}
