//! Click data read through the photoelectric (Poissonian) detection model.
//!
//! That model treats the click number as a photocount and estimates the
//! normally ordered photon moments `⟨:n̂^l:⟩` by factorial moments
//! `F_l = Σ_k k(k−1)⋯(k−l+1) c_k`. Because clicks saturate, classical light
//! can then produce negative eigenvalues: fake nonclassicality that the
//! click-moment analysis does not show.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::certify::{
    eigenvalue_functional, functional_std, significance, ANALYTIC_NEGATIVITY_FLOOR, DEFAULT_THRESHOLD,
};
use crate::clickmodel::{ClickStatistics, Mode};
use crate::error::{Error, Result};
use crate::moments::{build_matrix, sample_moments};
use crate::numerics::{falling_factorial, min_eigenpair, NeumaierSum, SymmetricMatrix};

/// `l`-th factorial moment of a single-mode click vector.
pub fn factorial_moment(clicks: &[f64], l: u32) -> f64 {
    clicks
        .iter()
        .enumerate()
        .map(|(k, c)| falling_factorial(k as u32, l) * c)
        .collect::<NeumaierSum>()
        .value()
}

/// Hankel matrix `(F_{s+t})_{s,t = 0..K/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotoelectricMomentMatrix {
    pub order: u32,
    pub matrix: SymmetricMatrix,
}

fn check_order(clicks: &[f64], k: u32) -> Result<()> {
    let bins = clicks.len().saturating_sub(1);
    if clicks.is_empty() || !k.is_multiple_of(2) || k as usize > bins {
        return Err(Error::domain(format!(
            "photoelectric order must be even and <= {bins}, got {k}"
        )));
    }
    Ok(())
}

pub fn photoelectric_matrix(clicks: &[f64], k: u32) -> Result<PhotoelectricMomentMatrix> {
    check_order(clicks, k)?;
    let f: Vec<f64> = (0..=k).map(|l| factorial_moment(clicks, l)).collect();
    let matrix = SymmetricMatrix::from_fn(k as usize / 2 + 1, |s, t| f[s + t])?;
    Ok(PhotoelectricMomentMatrix { order: k, matrix })
}

/// Minimal eigenvalue of one single-mode matrix under one detection model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelAssessment {
    pub value: f64,
    pub vector: Vec<f64>,
    pub uncertainty: Option<f64>,
    pub significance: Option<f64>,
    /// Negative beyond the threshold (finite trials) or beyond round-off (analytic).
    pub nonclassical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub mode: Mode,
    pub click: ModelAssessment,
    pub photoelectric: ModelAssessment,
    /// The two models reach different conclusions.
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub order: u32,
    pub threshold: f64,
    pub modes: [ModeComparison; 2],
}

impl ModelComparison {
    pub fn any_disagreement(&self) -> bool {
        self.modes.iter().any(|m| m.disagreement)
    }
}

fn assess(value: f64, vector: Vec<f64>, norm: f64, g: Option<(&[f64], &[f64], u64)>, threshold: f64) -> ModelAssessment {
    let floor = ANALYTIC_NEGATIVITY_FLOOR * norm.max(1.0);
    let uncertainty = g.map(|(probs, g, trials)| functional_std(probs, g, trials));
    let sig = uncertainty.and_then(|d| significance(value, d).ok());
    let nonclassical = match sig {
        Some(s) => s < -threshold,
        None => value < -floor,
    };
    ModelAssessment {
        value,
        vector,
        uncertainty,
        significance: sig,
        nonclassical,
    }
}

/// Lifts per-marginal coefficients onto the joint histogram cells.
fn lift(g: &[f64], mode: Mode, na: usize, nb: usize) -> Vec<f64> {
    let mut out = vec![0.0; na * nb];
    for a in 0..na {
        for b in 0..nb {
            out[a * nb + b] = match mode {
                Mode::A => g[a],
                Mode::B => g[b],
            };
        }
    }
    out
}

fn compare_mode(stats: &ClickStatistics, mode: Mode, k: u32, threshold: f64) -> Result<ModeComparison> {
    let (na, nb) = (stats.bins_a() as usize + 1, stats.bins_b() as usize + 1);
    let trials = stats.trials().count();

    let (ka, kb) = match mode {
        Mode::A => (k, 0),
        Mode::B => (0, k),
    };
    let click_matrix = build_matrix(&sample_moments(stats), ka, kb)?;
    let click_pair = min_eigenpair(&click_matrix.matrix)?;
    let click_g = match trials {
        Some(_) => Some(eigenvalue_functional(
            stats.bins_a(),
            stats.bins_b(),
            &click_pair.vector,
            &click_matrix.index_map,
        )?),
        None => None,
    };
    let click = assess(
        click_pair.value,
        click_pair.vector,
        click_matrix.matrix.frobenius_norm(),
        click_g.as_deref().zip(trials).map(|(g, r)| (stats.probs(), g, r)),
        threshold,
    );

    let clicks = stats.marginal(mode);
    let pe = photoelectric_matrix(&clicks, k)?;
    let pe_pair = min_eigenpair(&pe.matrix)?;
    let pe_g = trials.map(|_| {
        let half = k as usize / 2;
        let per_k: Vec<f64> = (0..clicks.len())
            .map(|kk| {
                let mut acc = NeumaierSum::new();
                for s in 0..=half {
                    for t in 0..=half {
                        acc.add(pe_pair.vector[s] * pe_pair.vector[t] * falling_factorial(kk as u32, (s + t) as u32));
                    }
                }
                acc.value()
            })
            .collect();
        lift(&per_k, mode, na, nb)
    });
    let photoelectric = assess(
        pe_pair.value,
        pe_pair.vector,
        pe.matrix.frobenius_norm(),
        pe_g.as_deref().zip(trials).map(|(g, r)| (stats.probs(), g, r)),
        threshold,
    );

    Ok(ModeComparison {
        mode,
        disagreement: click.nonclassical != photoelectric.nonclassical,
        click,
        photoelectric,
    })
}

/// Single-mode verdicts of the click and photoelectric models side by side.
///
/// For histograms with a trial count both eigenvalues get first-order
/// multinomial uncertainties with the eigenvector held fixed.
pub fn compare_models_with(stats: &ClickStatistics, k: u32, threshold: f64) -> Result<ModelComparison> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::domain(format!("significance threshold must be >= 0, got {threshold}")));
    }
    Ok(ModelComparison {
        order: k,
        threshold,
        modes: [
            compare_mode(stats, Mode::A, k, threshold)?,
            compare_mode(stats, Mode::B, k, threshold)?,
        ],
    })
}

/// [`compare_models_with`] at the default threshold.
pub fn compare_models(stats: &ClickStatistics, k: u32) -> Result<ModelComparison> {
    compare_models_with(stats, k, DEFAULT_THRESHOLD)
}
