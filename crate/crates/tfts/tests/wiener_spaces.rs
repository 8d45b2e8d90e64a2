use tfts::grid::GridFunction;
use tfts::tfcalc::IntegralBackend;
use tfts::thp::{thp_covariance, CovMethod, ThpParams};
use tfts::wiener::*;

#[test]
fn plancherel_holds_on_the_test_set() {
    for h in [0.6, 0.75, 0.9] {
        for lambda in [0.3, 1.0] {
            let rep = plancherel_check(h, lambda, IntegralBackend::Spectral, 1e-8).unwrap();
            assert!(rep.pass, "H={h} λ={lambda}: max error {:e}", rep.max_error());
        }
    }
}

#[test]
fn quadrature_backend_also_matches() {
    let rep = plancherel_check(0.75, 1.0, IntegralBackend::Quadrature, 1e-6).unwrap();
    assert!(rep.pass, "max error {:e}", rep.max_error());
}

#[test]
fn elementary_routes_agree_across_the_unit_boundary() {
    let f = TestFunction::indicator(0.0, 1.0).unwrap();
    let g = TestFunction::indicator(1.0, 2.0).unwrap();
    for (h, lambda) in [(0.6, 0.3), (0.9, 1.0)] {
        let a1 = a1_inner(&f, &g, h, lambda, IntegralBackend::Spectral).unwrap().value;
        let a2 = a2_inner(&f, &g, h, lambda).unwrap().value;
        assert!((a1 / a2 - 1.0).abs() <= 1e-8, "{a1} vs {a2}");
    }
}

#[test]
fn covariance_of_disjoint_steps_matches_the_increment_expansion() {
    let p = ThpParams::new(0.8, 0.7, 1.5).unwrap();
    let f = TestFunction::elementary(vec![Step { a: 2.0, lo: 0.0, hi: 0.5 }, Step { a: -1.0, lo: 0.5, hi: 1.25 }]).unwrap();
    let g = TestFunction::elementary(vec![Step { a: 0.5, lo: 2.0, hi: 3.0 }, Step { a: 3.0, lo: 3.5, hi: 4.0 }]).unwrap();
    let cov = wiener_covariance(&f, &g, &p).unwrap().value;
    // Σ a_i b_j Cov(Z(t_{i+1}) − Z(t_i), Z(s_{j+1}) − Z(s_j)) with R from the kernel route.
    let r = |t: f64, s: f64| thp_covariance(&p, t, s, CovMethod::KernelL2).unwrap();
    let inc = |t1: f64, t2: f64, s1: f64, s2: f64| r(t2, s2) - r(t2, s1) - r(t1, s2) + r(t1, s1);
    let TestFunction::Elementary(fs) = &f else { unreachable!() };
    let TestFunction::Elementary(gs) = &g else { unreachable!() };
    let mut expect = 0.0;
    for x in fs {
        for y in gs {
            expect += x.a * y.a * inc(x.lo, x.hi, y.lo, y.hi);
        }
    }
    assert!((cov / expect - 1.0).abs() <= 1e-6, "{cov} vs {expect}");
}

#[test]
fn variance_scales_quadratically() {
    let p = ThpParams::new(1.3, 0.5, 1.0).unwrap();
    let g = GridFunction::from_fn(-8.0, 1.0 / 32.0, 513, |x| (-x * x).exp() * (1.0 + 0.3 * x)).unwrap();
    let f = TestFunction::grid(g).unwrap();
    let v1 = wiener_variance(&f, &p).unwrap().value;
    let v3 = wiener_variance(&f.scaled(-3.0), &p).unwrap().value;
    assert!((v3 / (9.0 * v1) - 1.0).abs() < 1e-13);
}

#[test]
fn indicator_variance_for_h_above_one() {
    let p = ThpParams::new(1.7, 1.2, 0.8).unwrap();
    let f = TestFunction::indicator(0.0, 2.0).unwrap();
    let v = wiener_variance(&f, &p).unwrap().value;
    let r = thp_covariance(&p, 2.0, 2.0, CovMethod::Bessel).unwrap();
    assert!((v / r - 1.0).abs() < 1e-6);
}

#[test]
fn witness_is_cauchy_but_unbounded_in_l2() {
    let rep = non_completeness_witness(0.75, 1.0, &[10.0, 100.0, 1e3, 1e4, 1e5, 1e6]).unwrap();
    assert!(rep.pass);
}

#[test]
fn step_functions_approach_smooth_functions() {
    let g = GridFunction::from_fn(-6.0, 1.0 / 128.0, 1537, |x| (-2.0 * x * x).exp()).unwrap();
    let rep = density_check(&g, 0.7, 0.5, &[4, 8, 16, 32, 64]).unwrap();
    assert!(rep.pass);
}

#[test]
fn grid_functions_must_vanish_at_the_ends() {
    let g = GridFunction::from_fn(0.0, 0.1, 11, |x| x).unwrap();
    assert!(TestFunction::grid(g).is_err());
}

fn steps(cuts: Vec<f64>, heights: Vec<f64>) -> TestFunction {
    let mut pts = cuts;
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let s = pts.windows(2).zip(heights).map(|(w, a)| Step { a, lo: w[0], hi: w[1] }).collect();
    TestFunction::elementary(s).unwrap()
}

proptest::proptest! {
    #![proptest_config(proptest::test_runner::Config::with_cases(32))]

    #[test]
    fn inner_product_is_symmetric_and_bounded(
        h in 0.55f64..1.8,
        lambda in 0.2f64..3.0,
        cf in proptest::collection::vec(-2.0f64..4.0, 2..5),
        hf in proptest::collection::vec(-2.0f64..2.0, 4),
        cg in proptest::collection::vec(-2.0f64..4.0, 2..5),
        hg in proptest::collection::vec(-2.0f64..2.0, 4),
    ) {
        let (f, g) = (steps(cf, hf), steps(cg, hg));
        let nf = a2_inner(&f, &f, h, lambda).unwrap().value;
        let ng = a2_inner(&g, &g, h, lambda).unwrap().value;
        let fg = a2_inner(&f, &g, h, lambda).unwrap().value;
        let gf = a2_inner(&g, &f, h, lambda).unwrap().value;
        let scale = (nf * ng).sqrt().max(f64::MIN_POSITIVE);
        proptest::prop_assert!((fg - gf).abs() <= 1e-10 * scale);
        proptest::prop_assert!(fg * fg <= nf * ng * (1.0 + 1e-10) + 1e-300);
        let n3 = a2_inner(&f.scaled(3.0), &f.scaled(3.0), h, lambda).unwrap().value;
        proptest::prop_assert!((n3 - 9.0 * nf).abs() <= 1e-10 * nf.max(f64::MIN_POSITIVE));
    }
}
