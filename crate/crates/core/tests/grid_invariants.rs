//! Deterministic invariants checked over fixed parameter grids.

use clickstat_core::certify::{certify, DEFAULT_THRESHOLD};
use clickstat_core::clickmodel::{
    fock_click_distribution_raw, joint_click_distribution, single_mode_clicks, DetectorResponse, Mode,
};
use clickstat_core::moments::{build_matrix, click_weight, direct_moments, sample_moments, tmsv_moments};
use clickstat_core::numerics::{binomial, min_eigenpair};
use clickstat_core::states::{
    coherent_distribution, fock_distribution, thermal_distribution, tmsv_distribution, PhotonDistribution,
    PhotonNumbers,
};

const TOL: f64 = 1e-13;

fn responses() -> Vec<DetectorResponse> {
    let mut out = Vec::new();
    for eta in [0.05, 0.096, 0.4, 1.0] {
        for nu in [0.0, 0.1, 0.51] {
            out.push(DetectorResponse::new(eta, nu, 8).unwrap());
        }
    }
    out
}

fn states() -> Vec<(String, PhotonDistribution)> {
    let mut out = Vec::new();
    for xi in [0.25, 0.5, 1.0, 1.75] {
        out.push((format!("tmsv({xi})"), tmsv_distribution(xi, TOL).unwrap()));
    }
    let th = |m: f64| thermal_distribution(m, TOL).unwrap();
    let coh = |m: f64| coherent_distribution(m, TOL).unwrap();
    out.push(("thermal(0.5)⊗thermal(2)".into(), PhotonDistribution::product(th(0.5), th(2.0))));
    out.push(("coherent(1)⊗coherent(3)".into(), PhotonDistribution::product(coh(1.0), coh(3.0))));
    out.push(("thermal(1)⊗coherent(2)".into(), PhotonDistribution::product(th(1.0), coh(2.0))));
    for n in 0..=5 {
        out.push((
            format!("fock({n})⊗vacuum"),
            PhotonDistribution::product(fock_distribution(n), PhotonNumbers::vacuum()),
        ));
    }
    out
}

#[test]
fn pascal_rule_up_to_64() {
    for n in 2..=64u32 {
        for k in 1..n {
            let lhs = binomial(n, k).unwrap() as u128;
            let rhs = binomial(n - 1, k - 1).unwrap() as u128 + binomial(n - 1, k).unwrap() as u128;
            assert_eq!(lhs, rhs, "C({n}, {k})");
        }
    }
}

#[test]
fn moment_round_trip_on_grid() {
    for d in responses() {
        for (name, p) in states() {
            let s = joint_click_distribution(&p, &d, &d).unwrap();
            let sampled = sample_moments(&s);
            let direct = direct_moments(&p, &d, &d);
            assert_eq!(sampled.get(0, 0), 1.0);
            for (a, b) in sampled.values().iter().zip(direct.values()) {
                assert!((a - b).abs() < 1e-10, "{name} η={} ν={}: {a} vs {b}", d.eta(), d.nu());
            }
        }
    }
}

#[test]
fn closed_form_tmsv_moments_match_truncated_sum() {
    for d in responses() {
        for xi in [0.25, 0.5, 1.0, 1.75] {
            let closed = tmsv_moments(xi, &d, &d).unwrap();
            let summed = direct_moments(&tmsv_distribution(xi, TOL).unwrap(), &d, &d);
            for (a, b) in closed.values().iter().zip(summed.values()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }
}

#[test]
fn fock_clicks_have_no_significant_negativity() {
    for d in responses() {
        for n in 0..=200 {
            let raw = fock_click_distribution_raw(n, &d);
            let worst = raw.iter().copied().fold(0.0, f64::min);
            assert!(worst > -1e-12, "n={n} η={} ν={}: {worst:e}", d.eta(), d.nu());
        }
    }
}

#[test]
fn swapping_modes_transposes_statistics() {
    let da = DetectorResponse::new(0.4, 0.1, 8).unwrap();
    let db = DetectorResponse::new(0.096, 0.51, 8).unwrap();
    for (_, p) in states() {
        let s = joint_click_distribution(&p, &da, &db).unwrap();
        let swapped = joint_click_distribution(&p.swapped(), &db, &da).unwrap();
        assert_eq!(swapped.probs(), s.transposed().probs());
    }
}

#[test]
fn dark_counts_reduce_silence() {
    for (_, p) in states() {
        let pa = p.marginal(false);
        for eta in [0.05, 0.4, 1.0] {
            let mut last = f64::INFINITY;
            for nu in [0.0, 0.05, 0.1, 0.3, 0.51, 1.0] {
                let c0 = single_mode_clicks(pa, &DetectorResponse::new(eta, nu, 8).unwrap()).unwrap()[0];
                // Fock input at unit efficiency never leaves every bin silent.
                assert!(c0 < last || (c0 == 0.0 && last == 0.0), "η={eta} ν={nu}: {c0} after {last}");
                last = c0;
            }
        }
    }
}

#[test]
fn blind_detector_sees_vacuum() {
    let d = DetectorResponse::new(0.0, 0.0, 8).unwrap();
    for (_, p) in states() {
        let s = joint_click_distribution(&p, &d, &d).unwrap();
        assert_eq!(s.get(0, 0), 1.0);
    }
}

#[test]
fn symmetric_tmsv_marginals_agree() {
    for d in responses() {
        let s = joint_click_distribution(&tmsv_distribution(1.0, TOL).unwrap(), &d, &d).unwrap();
        for (a, b) in s.marginal(Mode::A).iter().zip(s.marginal(Mode::B)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_states_are_psd_to_eighth_order() {
    let th = |m: f64| thermal_distribution(m, TOL).unwrap();
    let coh = |m: f64| coherent_distribution(m, TOL).unwrap();
    let classical = [
        PhotonDistribution::product(coh(0.5), coh(4.0)),
        PhotonDistribution::product(th(0.3), th(3.0)),
        PhotonDistribution::product(th(2.0), coh(1.5)),
        PhotonDistribution::product(coh(10.0), PhotonNumbers::vacuum()),
    ];
    for d in responses() {
        for p in &classical {
            let table = sample_moments(&joint_click_distribution(p, &d, &d).unwrap());
            for ka in (0..=8).step_by(2) {
                for kb in (0..=8).step_by(2) {
                    if ka == 0 && kb == 0 {
                        continue;
                    }
                    let m = build_matrix(&table, ka, kb).unwrap();
                    let e = min_eigenpair(&m.matrix).unwrap().value;
                    assert!(e >= -1e-10, "({ka},{kb}) η={} ν={}: {e:e}", d.eta(), d.nu());
                }
            }
        }
    }
}

#[test]
fn tmsv_grid_is_jointly_nonclassical_at_second_order() {
    let grid = |lo: f64, hi: f64| (0..5).map(move |i| lo + (hi - lo) * i as f64 / 4.0);
    for eta in grid(0.05, 1.0) {
        for nu in grid(0.0, 1.0) {
            let d = DetectorResponse::new(eta, nu, 8).unwrap();
            for xi in grid(0.2, 1.75) {
                let s = joint_click_distribution(&tmsv_distribution(xi, TOL).unwrap(), &d, &d).unwrap();
                let c = certify(&s, 2, 2, DEFAULT_THRESHOLD).unwrap();
                assert!(c.a.value >= -1e-10 && c.b.value >= -1e-10, "η={eta} ν={nu} ξ={xi}");
                assert!(c.ab.value < 0.0, "η={eta} ν={nu} ξ={xi}: {}", c.ab.value);
            }
        }
    }
}

#[test]
fn transposed_certificate_swaps_single_mode_eigenvalues() {
    let da = DetectorResponse::new(0.4, 0.1, 8).unwrap();
    let db = DetectorResponse::new(0.096, 0.51, 8).unwrap();
    let s = joint_click_distribution(&tmsv_distribution(1.2, TOL).unwrap(), &da, &db).unwrap();
    for k in [2, 4, 8] {
        let c = certify(&s, k, k, DEFAULT_THRESHOLD).unwrap();
        let t = certify(&s.transposed(), k, k, DEFAULT_THRESHOLD).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-14 * c.ab.matrix_norm;
        assert!(close(c.a.value, t.b.value) && close(c.b.value, t.a.value), "K={k}");
        assert!(close(c.ab.value, t.ab.value), "K={k}");
        assert_eq!(c.verdict, t.verdict);
    }
}

/// Recovers a histogram from its full moment table by back substitution:
/// the weight `C(N − k, l)/C(N, l)` vanishes for `k > N − l`.
fn invert_moments(values: &[f64], bins: u32) -> Vec<f64> {
    let n = bins as usize + 1;
    let solve = |m: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for k in 0..n {
            let l = n - 1 - k;
            let known: f64 = (0..k).map(|j| click_weight(bins, j as u32, l as u32) * c[j]).sum();
            c[k] = (m[l] - known) / click_weight(bins, k as u32, l as u32);
        }
        c
    };
    let rows: Vec<Vec<f64>> = values.chunks(n).map(solve).collect();
    let mut out = vec![0.0; n * n];
    for lb_k in 0..n {
        let column: Vec<f64> = rows.iter().map(|r| r[lb_k]).collect();
        for (ka, c) in solve(&column).into_iter().enumerate() {
            out[ka * n + lb_k] = c;
        }
    }
    out
}

#[test]
fn eighth_order_moments_determine_the_histogram() {
    use clickstat_core::clickmodel::{ClickStatistics, Trials};
    use clickstat_core::numerics::RngStream;
    let mut rng = RngStream::new(2024);
    for _ in 0..200 {
        let raw: Vec<f64> = (0..81).map(|_| rng.uniform()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let s = ClickStatistics::new(8, 8, probs.clone(), Trials::Analytic).unwrap();
        let back = invert_moments(sample_moments(&s).values(), 8);
        let err = back.iter().zip(&probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err:e}");
    }
}

#[test]
fn eighth_order_tmsv_is_jointly_nonclassical_over_the_pump_range() {
    let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
    for power_uw in [50.0, 100.0, 200.0, 300.0, 403.0] {
        let xi = 0.087 * f64::sqrt(power_uw);
        let table = tmsv_moments(xi, &d, &d).unwrap();
        let c = clickstat_core::certify::certify_moments(&table, 8, 8, DEFAULT_THRESHOLD).unwrap();
        assert!(c.ab.value < 0.0, "P = {power_uw}: e_ab = {:e}", c.ab.value);
    }
}

#[test]
fn photoelectric_negativity_grows_with_squeezing() {
    use clickstat_core::photoelectric::compare_models;
    let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
    for k in [4, 6, 8] {
        let mut last = f64::INFINITY;
        for xi in [0.6, 1.0, 1.4, 1.75] {
            let s = joint_click_distribution(&tmsv_distribution(xi, TOL).unwrap(), &d, &d).unwrap();
            let c = compare_models(&s, k).unwrap();
            for m in &c.modes {
                assert!(m.click.value >= -1e-10);
                assert!(m.photoelectric.value < 0.0);
            }
            let e = c.modes[0].photoelectric.value;
            assert!(e < last, "K = {k}, xi = {xi}: {e} after {last}");
            last = e;
        }
    }
}
