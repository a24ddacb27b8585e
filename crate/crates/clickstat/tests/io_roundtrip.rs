use clickstat::io::{format_float, CertificateFile, HistogramFile, JsonFile, SweepEntry, SweepFile};
use clickstat_core::certify::{certify, DEFAULT_THRESHOLD};
use clickstat_core::clickmodel::{ClickStatistics, Trials};
use proptest::prelude::*;

fn histogram(bins_a: u32, bins_b: u32) -> impl Strategy<Value = Vec<f64>> {
    let cells = (bins_a as usize + 1) * (bins_b as usize + 1);
    prop::collection::vec(0.0..1.0f64, cells).prop_filter_map("non-empty", |raw| {
        let total: f64 = raw.iter().sum();
        (total > 0.0).then(|| raw.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn float_text_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn probability_histograms_round_trip(
        (ba, bb, probs) in (1u32..6, 1u32..6).prop_flat_map(|(a, b)| (Just(a), Just(b), histogram(a, b)))
    ) {
        let stats = ClickStatistics::new(ba, bb, probs, Trials::Analytic).unwrap();
        let text = HistogramFile::from_stats(&stats, None).unwrap().render().unwrap();
        let back = HistogramFile::parse(&text).unwrap();
        prop_assert_eq!(back.to_stats().unwrap(), stats);
        prop_assert_eq!(back.render().unwrap(), text);
    }

    #[test]
    fn count_histograms_round_trip(counts in prop::collection::vec(0u64..1_000_000, 9)) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let stats = ClickStatistics::from_counts(2, 2, &counts).unwrap();
        let file = HistogramFile::from_stats(&stats, None).unwrap();
        prop_assert_eq!(file.counts.as_ref().unwrap().concat(), counts);
        let back = HistogramFile::parse(&file.render().unwrap()).unwrap().to_stats().unwrap();
        prop_assert_eq!(back, stats);
    }
}

#[test]
fn certificate_and_sweep_files_round_trip() {
    let counts: Vec<u64> = (1..=25).collect();
    let stats = ClickStatistics::from_counts(4, 4, &counts).unwrap();
    let cert = CertificateFile::from_certificate(&certify(&stats, 2, 4, DEFAULT_THRESHOLD).unwrap()).unwrap();
    let text = cert.render().unwrap();
    assert_eq!(CertificateFile::parse(&text).unwrap(), cert);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let entry = |p: f64| SweepEntry {
        pump_power_uw: p,
        histogram: HistogramFile::from_stats(&stats, None).unwrap(),
    };
    let sweep = SweepFile::new(70e3, vec![entry(50.0), entry(403.0)]).unwrap();
    sweep.write(&path).unwrap();
    let points = SweepFile::read(&path).unwrap().to_sweep_points().unwrap();
    assert_eq!(points.len(), 2);
    assert!((points[1].pump.energy_nj() - 403.0 / 70.0).abs() < 1e-12);
}

#[test]
fn unknown_fields_and_versions_are_rejected() {
    let ok = r#"{"format_version": "1", "bins_a": 1, "bins_b": 1, "counts": [[1, 0], [0, 1]], "trials": 2}"#;
    assert!(HistogramFile::parse(ok).unwrap().to_stats().is_ok());
    let extra = r#"{"format_version": "1", "bins_a": 1, "bins_b": 1, "counts": [[1, 0], [0, 1]], "trials": 2, "x": 2}"#;
    assert!(HistogramFile::parse(extra).is_err());
    let version = r#"{"format_version": "9", "bins_a": 1, "bins_b": 1, "counts": [[1, 0], [0, 1]], "trials": 2}"#;
    assert!(HistogramFile::parse(version).is_err());
    let shape = r#"{"format_version": "1", "bins_a": 2, "bins_b": 1, "counts": [[1, 0], [0, 1]], "trials": 2}"#;
    assert!(HistogramFile::parse(shape).is_err());
    let total = r#"{"format_version": "1", "bins_a": 1, "bins_b": 1, "counts": [[1, 0], [0, 1]], "trials": 3}"#;
    let err = HistogramFile::parse(total).unwrap_err().to_string();
    assert!(err.contains("trials"), "{err}");
}
