use tfts::artfima::*;

fn sample_acvf(x: &[f64], lags: usize) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (0..=lags).map(|k| x.iter().zip(&x[k..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>() / n).collect()
}

#[test]
fn same_seed_same_path() {
    let m = ArtfimaModel::pure(0.6, 0.2, 1.0).unwrap();
    let a = simulate(&m, 500, 42, None).unwrap();
    let b = simulate(&m, 500, 42, None).unwrap();
    let c = simulate(&m, 500, 43, None).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let g = ArtfimaModel::new(vec![0.5, -0.3], 0.6, 0.2, vec![0.4], 1.0).unwrap();
    assert_eq!(simulate(&g, 300, 1, None).unwrap(), simulate(&g, 300, 1, None).unwrap());
}

#[test]
fn sample_moments_match_the_model() {
    let m = ArtfimaModel::pure(0.8, 0.1, 1.0).unwrap();
    let n = 1_000_000;
    let x = simulate(&m, n, 2024, None).unwrap().samples;
    let gamma = acvf_hyp2f1(&m, 400).unwrap().values;
    let long_run: f64 = gamma[0] + 2.0 * gamma[1..].iter().sum::<f64>();
    let mean = x.iter().sum::<f64>() / n as f64;
    assert!(mean.abs() < 4.0 * (long_run / n as f64).sqrt(), "{mean}");

    let emp = sample_acvf(&x, 20);
    let g = |j: i64| gamma.get(j.unsigned_abs() as usize).copied().unwrap_or(0.0);
    for (k, e) in emp.iter().enumerate() {
        // Bartlett's variance of the sample autocovariance.
        let k = k as i64;
        let var: f64 = (-380..=380).map(|j| g(j) * g(j) + g(j + k) * g(j - k)).sum::<f64>() / n as f64;
        assert!((e - g(k)).abs() < 4.0 * var.sqrt(), "lag {k}: {e} vs {}", g(k));
    }
}

#[test]
fn arma_stage_shapes_the_autocovariance() {
    // With α small and λ large the fractional part is nearly white, so an AR(1)
    // stage dominates: lag-one correlation ≈ φ.
    let m = ArtfimaModel::new(vec![0.6], 0.05, 3.0, vec![], 1.0).unwrap();
    let x = simulate(&m, 200_000, 5, None).unwrap().samples;
    let a = sample_acvf(&x, 1);
    assert!((a[1] / a[0] - 0.6).abs() < 0.02, "{}", a[1] / a[0]);
}

#[test]
fn too_short_paths_are_rejected() {
    let m = ArtfimaModel::pure(0.6, 0.2, 1.0).unwrap();
    assert!(simulate(&m, 1, 0, None).is_err());
}
