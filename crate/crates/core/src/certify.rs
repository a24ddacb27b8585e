//! Certification of nonclassical inter-mode click correlations.
//!
//! Classical light keeps every click-moment matrix positive semidefinite.
//! Correlations are certified as nonclassical when both single-mode matrices
//! `M^{(K_A,0)}`, `M^{(0,K_B)}` pass while the joint `M^{(K_A,K_B)}` has a
//! negative minimal eigenvalue. For measured data each minimal eigenvalue
//! carries a standard deviation and is judged by its signed significance
//! `Σ = e / Δe`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::clickmodel::{ClickStatistics, Trials};
use crate::error::{Error, Result};
use crate::moments::{build_matrix, sample_moments, weight_table, MomentMatrix, MomentTable};
use crate::numerics::{min_eigenpair, sample_multinomial, NeumaierSum, RngStream};

/// Significance level below which a negativity counts, `Σ < −3`.
pub const DEFAULT_THRESHOLD: f64 = 3.0;

/// Analytic eigenvalues down to `−1e−10 · max(1, ‖M‖_F)` are treated as zero.
pub const ANALYTIC_NEGATIVITY_FLOOR: f64 = 1e-10;

/// Smallest number of bootstrap resamples accepted.
pub const MIN_BOOTSTRAP_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NonclassicalCorrelations,
    ClassicalConsistent,
    SingleModeNonclassical,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NonclassicalCorrelations => "nonclassical-correlations",
            Verdict::ClassicalConsistent => "classical-consistent",
            Verdict::SingleModeNonclassical => "single-mode-nonclassical",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Verdict::NonclassicalCorrelations,
            Verdict::ClassicalConsistent,
            Verdict::SingleModeNonclassical,
            Verdict::Inconclusive,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Minimal eigenpair of one click-moment matrix with its error analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalEigen {
    pub value: f64,
    pub vector: Vec<f64>,
    pub index_map: Vec<(u32, u32)>,
    /// Standard deviation of `value`; `None` for analytic input.
    pub uncertainty: Option<f64>,
    /// `value / uncertainty` when the uncertainty is positive.
    pub significance: Option<f64>,
    /// `‖M‖_F`, which scales the analytic round-off floor.
    pub matrix_norm: f64,
}

impl MinimalEigen {
    fn from_matrix(m: &MomentMatrix) -> Result<Self> {
        let pair = min_eigenpair(&m.matrix)?;
        Ok(Self {
            value: pair.value,
            vector: pair.vector,
            index_map: m.index_map.clone(),
            uncertainty: None,
            significance: None,
            matrix_norm: m.matrix.frobenius_norm(),
        })
    }

    fn attach_uncertainty(&mut self, delta: f64) {
        self.uncertainty = Some(delta);
        self.significance = significance(self.value, delta).ok();
    }

    fn analytic_floor(&self) -> f64 {
        ANALYTIC_NEGATIVITY_FLOOR * self.matrix_norm.max(1.0)
    }

    fn classify(&self, threshold: f64) -> Sign {
        match (self.significance, self.uncertainty) {
            (Some(sigma), _) if sigma < -threshold => Sign::Negative,
            (Some(_), _) => Sign::Clear,
            (None, None) if self.value < -self.analytic_floor() => Sign::Negative,
            (None, None) => Sign::Clear,
            // Zero spread: only an eigenvalue at the round-off floor is meaningful.
            (None, Some(_)) if self.value.abs() <= self.analytic_floor() => Sign::Clear,
            (None, Some(_)) => Sign::Undefined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Negative,
    Clear,
    Undefined,
}

/// Verdict on one histogram at orders `(K_A, K_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub order: (u32, u32),
    pub threshold: f64,
    pub a: MinimalEigen,
    pub b: MinimalEigen,
    pub ab: MinimalEigen,
    pub verdict: Verdict,
}

fn decide(a: &MinimalEigen, b: &MinimalEigen, ab: &MinimalEigen, threshold: f64) -> Verdict {
    let (sa, sb, sab) = (a.classify(threshold), b.classify(threshold), ab.classify(threshold));
    if sa == Sign::Negative || sb == Sign::Negative {
        Verdict::SingleModeNonclassical
    } else if sa == Sign::Undefined || sb == Sign::Undefined {
        Verdict::Inconclusive
    } else if sab == Sign::Negative {
        Verdict::NonclassicalCorrelations
    } else if sab == Sign::Undefined {
        Verdict::Inconclusive
    } else {
        Verdict::ClassicalConsistent
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold >= 0.0 && threshold.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("significance threshold must be >= 0, got {threshold}")))
    }
}

fn minimal_eigens(table: &MomentTable, k_a: u32, k_b: u32) -> Result<[MinimalEigen; 3]> {
    Ok([
        MinimalEigen::from_matrix(&build_matrix(table, k_a, 0)?)?,
        MinimalEigen::from_matrix(&build_matrix(table, 0, k_b)?)?,
        MinimalEigen::from_matrix(&build_matrix(table, k_a, k_b)?)?,
    ])
}

/// Certificate from a moment table alone, with no uncertainties.
pub fn certify_moments(table: &MomentTable, k_a: u32, k_b: u32, threshold: f64) -> Result<Certificate> {
    check_threshold(threshold)?;
    let [a, b, ab] = minimal_eigens(table, k_a, k_b)?;
    let verdict = decide(&a, &b, &ab, threshold);
    Ok(Certificate {
        order: (k_a, k_b),
        threshold,
        a,
        b,
        ab,
        verdict,
    })
}

/// Certificate of a click histogram.
///
/// Histograms with a finite trial count get first-order uncertainties from
/// [`eigenvalue_uncertainty`]; analytic ones are judged by sign against a
/// round-off floor of `1e−10 · max(1, ‖M‖_F)`.
pub fn certify(stats: &ClickStatistics, k_a: u32, k_b: u32, threshold: f64) -> Result<Certificate> {
    let mut cert = certify_moments(&sample_moments(stats), k_a, k_b, threshold)?;
    if let Trials::Finite(_) = stats.trials() {
        for e in [&mut cert.a, &mut cert.b, &mut cert.ab] {
            let delta = eigenvalue_uncertainty(stats, &e.vector, &e.index_map)?;
            e.attach_uncertainty(delta);
        }
        cert.verdict = decide(&cert.a, &cert.b, &cert.ab, threshold);
    }
    Ok(cert)
}

/// Per-cell coefficients `g` with `f†Mf = Σ g_{k_A,k_B} c_{k_A,k_B}` for a fixed vector `f`.
pub fn eigenvalue_functional(
    bins_a: u32,
    bins_b: u32,
    vector: &[f64],
    index_map: &[(u32, u32)],
) -> Result<Vec<f64>> {
    if vector.len() != index_map.len() {
        return Err(Error::domain("eigenvector and index map lengths differ"));
    }
    let (na, nb) = (bins_a as usize + 1, bins_b as usize + 1);
    // Collapse f_i f_j onto the moment (l_A, l_B) each matrix entry reads.
    let mut coeff = vec![0.0; na * nb];
    for (i, (sa, sb)) in index_map.iter().enumerate() {
        for (j, (ta, tb)) in index_map.iter().enumerate() {
            let (la, lb) = ((sa + ta) as usize, (sb + tb) as usize);
            if la >= na || lb >= nb {
                return Err(Error::domain("index map reaches beyond the histogram"));
            }
            coeff[la * nb + lb] += vector[i] * vector[j];
        }
    }
    let wa = weight_table(bins_a);
    let wb = weight_table(bins_b);
    let mut g = vec![0.0; na * nb];
    for ka in 0..na {
        for kb in 0..nb {
            let mut acc = NeumaierSum::new();
            for la in 0..na {
                for lb in 0..nb {
                    let h = coeff[la * nb + lb];
                    if h != 0.0 {
                        acc.add(h * wa[ka][la] * wb[kb][lb]);
                    }
                }
            }
            g[ka * nb + kb] = acc.value();
        }
    }
    Ok(g)
}

/// Multinomial standard deviation `√(Σ c (g − ḡ)² / R)` of the linear statistic `Σ g c`.
pub fn functional_std(probs: &[f64], g: &[f64], trials: u64) -> f64 {
    let mean: f64 = probs.iter().zip(g).map(|(c, x)| c * x).collect::<NeumaierSum>().value();
    let var: f64 = probs
        .iter()
        .zip(g)
        .map(|(c, x)| c * (x - mean) * (x - mean))
        .collect::<NeumaierSum>()
        .value();
    libm::sqrt(var.max(0.0) / trials as f64)
}

/// First-order standard deviation of `e = f†Mf` with `f` held fixed.
pub fn eigenvalue_uncertainty(stats: &ClickStatistics, vector: &[f64], index_map: &[(u32, u32)]) -> Result<f64> {
    let Trials::Finite(trials) = stats.trials() else {
        return Err(Error::MissingTrials(
            "analytic statistics carry no sampling error; use a histogram with a trial count or the bootstrap"
                .into(),
        ));
    };
    let g = eigenvalue_functional(stats.bins_a(), stats.bins_b(), vector, index_map)?;
    Ok(functional_std(stats.probs(), &g, trials))
}

/// Signed significance `e / Δe` of an eigenvalue against the classical bound 0.
pub fn significance(e_mean: f64, delta_e: f64) -> Result<f64> {
    if !(delta_e > 0.0) {
        return Err(Error::domain(format!("uncertainty must be > 0, got {delta_e}")));
    }
    Ok(e_mean / delta_e)
}

/// Certificate whose uncertainties come from resampling rather than propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCertificate {
    /// Plug-in eigenvalues with bootstrap standard deviations and significances.
    pub certificate: Certificate,
    /// Bootstrap means of `e_A`, `e_B`, `e_AB`.
    pub means: [f64; 3],
    pub resamples: usize,
}

/// Minimal eigenvalues `[e_A, e_B, e_AB]` of bootstrap replicate `index`.
///
/// Replicate `i` draws on `RngStream::with_stream(seed, i)`, so replicates
/// may be computed in any order.
pub fn bootstrap_replicate(stats: &ClickStatistics, k_a: u32, k_b: u32, seed: u64, index: u64) -> Result<[f64; 3]> {
    let Trials::Finite(trials) = stats.trials() else {
        return Err(Error::MissingTrials("bootstrap resampling needs a trial count".into()));
    };
    let mut rng = RngStream::with_stream(seed, index);
    let counts = sample_multinomial(&mut rng, trials, stats.probs());
    let resampled = ClickStatistics::from_counts(stats.bins_a(), stats.bins_b(), &counts)?;
    let [a, b, ab] = minimal_eigens(&sample_moments(&resampled), k_a, k_b)?;
    Ok([a.value, b.value, ab.value])
}

/// Combines replicates into a [`BootstrapCertificate`] around the plug-in estimate.
pub fn summarize_bootstrap(stats: &ClickStatistics, k_a: u32, k_b: u32, threshold: f64, replicates: &[[f64; 3]]) -> Result<BootstrapCertificate> {
    if replicates.len() < 2 {
        return Err(Error::domain("bootstrap summary needs at least two replicates"));
    }
    let mut cert = certify_moments(&sample_moments(stats), k_a, k_b, threshold)?;
    let count = replicates.len() as f64;
    let mut means = [0.0; 3];
    for (slot, mean) in means.iter_mut().enumerate() {
        *mean = replicates.iter().map(|r| r[slot]).collect::<NeumaierSum>().value() / count;
    }
    for (slot, e) in [&mut cert.a, &mut cert.b, &mut cert.ab].into_iter().enumerate() {
        let var = replicates
            .iter()
            .map(|r| (r[slot] - means[slot]) * (r[slot] - means[slot]))
            .collect::<NeumaierSum>()
            .value()
            / (count - 1.0);
        e.attach_uncertainty(libm::sqrt(var));
    }
    cert.verdict = decide(&cert.a, &cert.b, &cert.ab, threshold);
    Ok(BootstrapCertificate {
        certificate: cert,
        means,
        resamples: replicates.len(),
    })
}

/// Multinomial bootstrap: resample the histogram at its own frequencies,
/// re-extract each minimal eigenpair, and report means and standard deviations.
pub fn bootstrap_certificate(
    stats: &ClickStatistics,
    k_a: u32,
    k_b: u32,
    resamples: usize,
    seed: u64,
    threshold: f64,
) -> Result<BootstrapCertificate> {
    if resamples < MIN_BOOTSTRAP_RESAMPLES {
        return Err(Error::domain(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP_RESAMPLES} resamples, got {resamples}"
        )));
    }
    let replicates = (0..resamples as u64)
        .map(|i| bootstrap_replicate(stats, k_a, k_b, seed, i))
        .collect::<Result<Vec<_>>>()?;
    summarize_bootstrap(stats, k_a, k_b, threshold, &replicates)
}
