use std::path::Path;
use std::process::Command;
use tfts::acceptance::{run_criterion, SuiteConfig, Tolerances, CRITERIA};

fn criterion(id: u8) {
    let rep = run_criterion(id, &SuiteConfig::default()).unwrap();
    let verdict = if rep.pass { "PASS" } else { "FAIL" };
    println!("{verdict} {}", rep.name);
    for r in rep.rows.iter().filter(|r| !r.pass) {
        println!(
            "    {}: computed {:.9e}, reference {:.9e}, error {:.3e} > {:.3e}",
            r.label, r.computed, r.reference, r.error, r.tolerance
        );
    }
    assert!(rep.pass, "{} failed", rep.name);
}

#[test]
fn criterion_01_ar1_anchor() {
    criterion(1);
}

#[test]
fn criterion_02_acvf_calibration() {
    criterion(2);
}

#[test]
fn criterion_03_acvf_large_lag_asymptotics() {
    criterion(3);
}

#[test]
fn criterion_04_thp_three_way_agreement() {
    criterion(4);
}

#[test]
fn criterion_05_thp_scaling_law() {
    criterion(5);
}

#[test]
fn criterion_06_kolmogorov_slope() {
    criterion(6);
}

#[test]
fn criterion_07_matern_decomposition() {
    criterion(7);
}

#[test]
fn criterion_08_inverse_pair() {
    criterion(8);
}

#[test]
fn criterion_09_plancherel_and_non_completeness() {
    criterion(9);
}

#[test]
fn criterion_10_partial_sum_variance() {
    criterion(10);
}

#[test]
fn criterion_11_fdd_covariance() {
    criterion(11);
}

#[test]
fn criterion_12_invariance_monte_carlo() {
    criterion(12);
}

#[test]
fn criterion_13_weighted_sums() {
    criterion(13);
}

#[test]
fn criterion_14_tightness() {
    criterion(14);
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn criterion_15_determinism() {
    let ids = "1,2,3,4,5,6,7,8,9,10,11,12,13,14";
    let mut runs = Vec::new();
    for jobs in ["1", "3"] {
        let out = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_tfts"))
            .args(["--seed", "0", "--jobs", jobs, "--out"])
            .arg(out.path())
            .args(["acceptance", "--criterion", ids])
            .output()
            .unwrap();
        assert!(matches!(status.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&status.stderr));
        runs.push(csv_files(&out.path().join("acceptance")));
    }
    assert_eq!(runs[0].len(), 14);
    let same = runs[0] == runs[1];
    println!("{} criterion 15: {} ({} CSV files, jobs 1 vs 3)", if same { "PASS" } else { "FAIL" }, CRITERIA[14].1, runs[0].len());
    for ((name, a), (_, b)) in runs[0].iter().zip(&runs[1]) {
        assert!(a == b, "{name} differs between runs");
    }
}

#[test]
fn tolerances_are_pinned() {
    let t = Tolerances::default();
    let pinned = Tolerances {
        ar1_anchor: 1e-8,
        acvf_calibration: 1e-8,
        acvf_asymptotic: 0.02,
        thp_agreement: 1e-4,
        thp_agreement_tight: 1e-6,
        scaling_law: 1e-8,
        kolmogorov_slope: 0.02,
        semimartingale: 0.01,
        inverse_pair: 1e-6,
        plancherel: 1e-8,
        partial_sum_variance: 0.02,
        fdd_covariance: 0.02,
        polarization: 1e-12,
        mc_standard_errors: 4.0,
        ks_level: 0.01,
        weighted_variance: 0.02,
        tightness_spread: 10.0,
        tightness_stability: 0.2,
        sandwich_eps: 0.01,
    };
    assert_eq!(t, pinned);
    let s = SuiteConfig::default();
    assert_eq!((s.seed, s.mc_paths), (0, 10_000));
}
