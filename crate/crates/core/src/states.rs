//! Photon-number distributions of the source models.
//!
//! Click statistics depend on a state only through its Fock-diagonal
//! elements, so a two-mode state is stored either as a correlated diagonal
//! `Pr[n_A = n_B = n]` (the squeezed vacuum and Fock pairs) or as a product of
//! two single-mode distributions. Phases are not represented.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

/// Tail tolerance used when none is given.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Longest photon-number vector any constructor will allocate.
pub const MAX_TRUNCATION: usize = 50_000_000;

/// A photon-number distribution truncated at `n_max`, with the discarded mass recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumbers {
    probs: Vec<f64>,
    tail_bound: f64,
}

impl PhotonNumbers {
    /// Wraps explicit probabilities; they must be non-negative and sum to one
    /// with `tail_bound` within 1e-12.
    pub fn new(probs: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("photon-number distribution is empty"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || !(tail_bound >= 0.0) {
            return Err(Error::domain("photon-number probabilities must be finite and non-negative"));
        }
        let total = probs.iter().copied().collect::<NeumaierSum>().value() + tail_bound;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "photon-number probabilities sum to {total} including the tail"
            )));
        }
        Ok(Self { probs, tail_bound })
    }

    /// Point mass at `n`.
    pub fn fock(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        Self {
            probs,
            tail_bound: 0.0,
        }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Probability mass retained below the truncation.
    pub fn retained_mass(&self) -> f64 {
        self.probs.iter().copied().collect::<NeumaierSum>().value()
    }

    /// `Σ n p(n)` over the retained support.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .collect::<NeumaierSum>()
            .value()
    }
}

/// A two-mode photon-number distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum PhotonDistribution {
    /// `probs()[n] = Pr[n_A = n_B = n]`; all other joint numbers have zero weight.
    CorrelatedDiagonal(PhotonNumbers),
    /// Independent modes.
    Product(PhotonNumbers, PhotonNumbers),
}

impl PhotonDistribution {
    pub fn vacuum() -> Self {
        Self::CorrelatedDiagonal(PhotonNumbers::vacuum())
    }

    pub fn product(a: PhotonNumbers, b: PhotonNumbers) -> Self {
        Self::Product(a, b)
    }

    /// The same distribution with modes A and B exchanged.
    pub fn swapped(&self) -> Self {
        match self {
            Self::CorrelatedDiagonal(p) => Self::CorrelatedDiagonal(p.clone()),
            Self::Product(a, b) => Self::Product(b.clone(), a.clone()),
        }
    }

    /// Single-mode distribution of mode A (`mode_b = false`) or B.
    pub fn marginal(&self, mode_b: bool) -> &PhotonNumbers {
        match (self, mode_b) {
            (Self::CorrelatedDiagonal(p), _) => p,
            (Self::Product(a, _), false) => a,
            (Self::Product(_, b), true) => b,
        }
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tail tolerance must lie in (0, 1), got {tol}")))
    }
}

/// Geometric law `(1 − r) rⁿ`, cut at the smallest `n_max` with `r^(n_max+1) ≤ tol`.
fn geometric(ratio: f64, tol: f64) -> Result<PhotonNumbers> {
    if ratio == 0.0 {
        return Ok(PhotonNumbers::vacuum());
    }
    let ln_r = libm::log(ratio);
    let n_max = libm::ceil(libm::log(tol) / ln_r - 1.0).max(0.0);
    let mut n_max = n_max as usize;
    // Guard the float estimate of the cut in both directions.
    while n_max > 0 && libm::pow(ratio, n_max as f64) <= tol {
        n_max -= 1;
    }
    while libm::pow(ratio, (n_max + 1) as f64) > tol {
        n_max += 1;
    }
    if n_max >= MAX_TRUNCATION {
        return Err(Error::domain(format!(
            "truncation would need {n_max} photon numbers; raise the tolerance"
        )));
    }
    let head = 1.0 - ratio;
    let probs = (0..=n_max)
        .map(|n| head * libm::pow(ratio, n as f64))
        .collect();
    Ok(PhotonNumbers {
        probs,
        tail_bound: libm::pow(ratio, (n_max + 1) as f64),
    })
}

/// Two-mode squeezed vacuum: `p(n) = tanh²ⁿξ / cosh²ξ` on the diagonal `n_A = n_B = n`.
pub fn tmsv_distribution(xi: f64, tol: f64) -> Result<PhotonDistribution> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!("squeezing parameter must be >= 0, got {xi}")));
    }
    check_tolerance(tol)?;
    let t = libm::tanh(xi);
    Ok(PhotonDistribution::CorrelatedDiagonal(geometric(t * t, tol)?))
}

/// Mean photon number of both modes together, `2 sinh²ξ`.
pub fn mean_total_photons(xi: f64) -> f64 {
    let s = libm::sinh(xi);
    2.0 * s * s
}

/// Single-mode thermal state, `p(n) = n̄ⁿ / (1 + n̄)ⁿ⁺¹`.
pub fn thermal_distribution(nbar: f64, tol: f64) -> Result<PhotonNumbers> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::domain(format!("thermal mean must be >= 0, got {nbar}")));
    }
    check_tolerance(tol)?;
    geometric(nbar / (1.0 + nbar), tol)
}

/// Single-mode coherent state of mean `|α|²`: Poissonian photon numbers.
pub fn coherent_distribution(mean: f64, tol: f64) -> Result<PhotonNumbers> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!("coherent mean must be >= 0, got {mean}")));
    }
    check_tolerance(tol)?;
    if mean == 0.0 {
        return Ok(PhotonNumbers::vacuum());
    }
    let ln_mean = libm::log(mean);
    let log_p = |n: usize| -mean + n as f64 * ln_mean - libm::lgamma(n as f64 + 1.0);
    let mut probs = Vec::new();
    let mut n = 0usize;
    loop {
        probs.push(libm::exp(log_p(n)));
        // Stop once Σ_{j≥n} p(j) ≤ tol; that bounds both the discarded mass and
        // the discarded part of the mean, mean · Σ_{j≥n} p(j). Beyond the mode the
        // sum is dominated by a geometric series of ratio mean / (n + 1).
        let next = (n + 1) as f64;
        if next > mean {
            let bound = libm::exp(log_p(n)) / (1.0 - mean / next);
            if bound <= tol {
                break;
            }
        }
        n += 1;
        if n >= MAX_TRUNCATION {
            return Err(Error::domain("coherent truncation exceeds the supported length"));
        }
    }
    let retained = probs.iter().copied().collect::<NeumaierSum>().value();
    Ok(PhotonNumbers {
        probs,
        tail_bound: (1.0 - retained).max(0.0),
    })
}

/// Fock state `|n⟩` as a single-mode distribution.
pub fn fock_distribution(n: usize) -> PhotonNumbers {
    PhotonNumbers::fock(n)
}

/// Squeezing parameter `ξ = ξ₀ √P` for pump power `P` in μW.
pub fn xi_from_power(xi0: f64, power_uw: f64) -> Result<f64> {
    if !(xi0 >= 0.0) || !(power_uw >= 0.0) {
        return Err(Error::domain(format!(
            "xi0 and pump power must be >= 0, got {xi0} and {power_uw}"
        )));
    }
    Ok(xi0 * libm::sqrt(power_uw))
}

/// Variance of the squeezed quadrature in units of the vacuum variance.
pub fn squeezed_quadrature_variance(xi: f64) -> f64 {
    libm::exp(-2.0 * xi)
}

/// Pump power and pulse repetition rate; the pulse energy follows from both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSetting {
    pub power_uw: f64,
    pub repetition_rate_hz: f64,
}

impl PumpSetting {
    pub fn new(power_uw: f64, repetition_rate_hz: f64) -> Result<Self> {
        if !(power_uw >= 0.0 && power_uw.is_finite()) {
            return Err(Error::domain(format!("pump power must be >= 0 μW, got {power_uw}")));
        }
        if !(repetition_rate_hz > 0.0 && repetition_rate_hz.is_finite()) {
            return Err(Error::domain(format!(
                "repetition rate must be > 0 Hz, got {repetition_rate_hz}"
            )));
        }
        Ok(Self {
            power_uw,
            repetition_rate_hz,
        })
    }

    pub fn from_energy(energy_j: f64, repetition_rate_hz: f64) -> Result<Self> {
        Self::new(energy_j * repetition_rate_hz * 1e6, repetition_rate_hz)
    }

    /// Energy per pulse in joules.
    pub fn energy_j(&self) -> f64 {
        self.power_uw * 1e-6 / self.repetition_rate_hz
    }

    pub fn energy_nj(&self) -> f64 {
        self.energy_j() * 1e9
    }
}
