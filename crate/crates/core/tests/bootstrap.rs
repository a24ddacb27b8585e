//! Multinomial bootstrap against the fixed-eigenvector propagation.

use clickstat_core::certify::{bootstrap_certificate, certify, Certificate, DEFAULT_THRESHOLD};
use clickstat_core::clickmodel::{joint_click_distribution, ClickStatistics, DetectorResponse, Trials};
use clickstat_core::states::tmsv_distribution;

fn tmsv_stats(trials: u64) -> ClickStatistics {
    let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
    joint_click_distribution(&tmsv_distribution(1.0, 1e-12).unwrap(), &d, &d)
        .unwrap()
        .with_trials(Trials::Finite(trials))
        .unwrap()
}

fn spreads(c: &Certificate) -> [f64; 3] {
    [c.a.uncertainty.unwrap(), c.b.uncertainty.unwrap(), c.ab.uncertainty.unwrap()]
}

#[test]
fn degenerate_histogram_has_zero_spread() {
    let mut counts = vec![0u64; 81];
    counts[0] = 1000;
    let s = ClickStatistics::from_counts(8, 8, &counts).unwrap();
    let b = bootstrap_certificate(&s, 2, 2, 100, 1, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(spreads(&b.certificate), [0.0; 3]);
}

#[test]
fn propagation_matches_bootstrap_at_experimental_trials() {
    let s = tmsv_stats(42_000_000);
    let fixed = spreads(&certify(&s, 2, 2, DEFAULT_THRESHOLD).unwrap());
    let boot = bootstrap_certificate(&s, 2, 2, 500, 9, DEFAULT_THRESHOLD).unwrap();
    for (f, b) in fixed.iter().zip(spreads(&boot.certificate)) {
        assert!((b / f - 1.0).abs() < 0.1, "fixed {f:e}, bootstrap {b:e}");
    }
}

#[test]
fn doubling_trials_shrinks_spread_by_root_two() {
    let one = bootstrap_certificate(&tmsv_stats(1_000_000), 2, 2, 400, 4, DEFAULT_THRESHOLD).unwrap();
    let two = bootstrap_certificate(&tmsv_stats(2_000_000), 2, 2, 400, 4, DEFAULT_THRESHOLD).unwrap();
    for (x, y) in spreads(&one.certificate).iter().zip(spreads(&two.certificate)) {
        let ratio = x / y;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.15, "ratio {ratio}");
    }
}

#[test]
fn bootstrap_mean_is_near_plug_in() {
    let resamples = 300;
    let b = bootstrap_certificate(&tmsv_stats(1_000_000), 2, 2, resamples, 6, DEFAULT_THRESHOLD).unwrap();
    let c = &b.certificate;
    for (mean, e) in b.means.iter().zip([&c.a, &c.b, &c.ab]) {
        let standard_error = e.uncertainty.unwrap() / (resamples as f64).sqrt();
        assert!((mean - e.value).abs() < 3.0 * standard_error, "mean {mean:e}, plug-in {:e}", e.value);
    }
}

#[test]
fn bootstrap_is_reproducible() {
    let s = tmsv_stats(100_000);
    let a = bootstrap_certificate(&s, 2, 2, 100, 3, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(a, bootstrap_certificate(&s, 2, 2, 100, 3, DEFAULT_THRESHOLD).unwrap());
    assert!(bootstrap_certificate(&s, 2, 2, 99, 3, DEFAULT_THRESHOLD).is_err());
}
