use tfts::artfima::*;
use tfts::tfcalc::{frac_weights, WeightKind};

#[test]
fn calibration_validates_on_the_grid() {
    let rep = validate_calibration();
    assert!(rep.pass, "{:#?}", rep.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
    assert_eq!(rep.rows.len(), 60);
}

#[test]
fn asymptotic_ratio_approaches_one_monotonically() {
    let m = ArtfimaModel::pure(0.7, 0.01, 1.0).unwrap();
    let lags = [200usize, 400, 800, 1600, 3200];
    let q = acvf_quadrature_lags(&m, &lags).unwrap();
    let dev: Vec<f64> = lags.iter().zip(&q).map(|(k, (v, _))| (v / acvf_asymptotic(&m, *k).unwrap() - 1.0).abs()).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]));
    // Reference |ratio − 1| at k = 200 and 800 from the mpmath closed form.
    assert!((dev[0] - 0.042_489_732_617_555_6).abs() < 1e-9, "{}", dev[0]);
    assert!((dev[2] - 0.012_318_245_607_919_4).abs() < 1e-9, "{}", dev[2]);
}

#[test]
fn large_lags_agree_between_routes() {
    let m = ArtfimaModel::pure(0.7, 0.01, 1.0).unwrap();
    let q = acvf_quadrature_lags(&m, &[1000, 3000]).unwrap();
    let f = acvf_hyp2f1(&m, 3000).unwrap();
    assert!((q[0].0 / f.values[1000] - 1.0).abs() < 1e-10);
    assert!((q[1].0 / f.values[3000] - 1.0).abs() < 1e-10);
}

#[test]
fn parseval_for_the_filter_coefficients() {
    for (a, l) in [(0.3, 0.05), (0.8, 0.1), (1.7, 0.5)] {
        let m = ArtfimaModel::pure(a, l, 1.0).unwrap();
        let g0 = acvf_quadrature(&m, 0).unwrap().values[0];
        let w = frac_weights(a, l, 1.0, WeightKind::Integration, None).unwrap();
        let s: f64 = w.w.iter().map(|c| c * c).sum();
        assert!((s / g0 - 1.0).abs() < 1e-8, "α={a} λ={l}");
    }
}

#[test]
fn autocovariances_are_positive_definite_and_bounded() {
    for (a, l) in [(0.3, 0.1), (1.2, 0.5), (2.0, 1.0)] {
        let m = ArtfimaModel::pure(a, l, 1.3).unwrap();
        let acvf = acvf_quadrature(&m, 40).unwrap();
        assert!(acvf.values[0] > 0.0);
        assert!(acvf.values.iter().all(|g| g.abs() <= acvf.values[0]));
        assert!(acvf.is_positive_semidefinite(20));
    }
}

#[test]
fn short_memory_partial_sums_converge() {
    let m = ArtfimaModel::pure(0.9, 0.1, 1.0).unwrap();
    let g = acvf_hyp2f1(&m, 10_000).unwrap().values;
    let total: f64 = g.iter().sum();
    let last = g[10_000];
    assert!(last.abs() / total < 1e-10);
    // Tail beyond K = 200 stays below the integrated envelope e^{−λk}k^{α−1}.
    let tail: f64 = g[201..].iter().sum();
    let env = acvf_asymptotic(&m, 200).unwrap() / (1.0 - (-0.1f64).exp());
    assert!(tail <= env);
}
