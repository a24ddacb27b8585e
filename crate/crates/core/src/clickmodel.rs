//! Joint click-counting statistics of two time-multiplexed detectors.
//!
//! Each arm splits its pulse into `N` time bins read by on/off detectors and
//! reports the number `k` of bins that clicked. Under the linear response
//! `Γ(n̂/N) = η n̂/N + ν` the no-click operator of `L` bins is
//! `:exp(−L(η n̂/N + ν)):`, whose Fock expectation is `e^{−νL} (1 − ηL/N)ⁿ`.
//! Inclusion-exclusion over the silent bins gives
//!
//! ```text
//! c_k(n) = C(N,k) Σ_{j=0}^{k} C(k,j) (−1)^j e^{−ν(N−k+j)} (1 − η(N−k+j)/N)^n
//! ```
//!
//! The Monte Carlo path simulates the same detector photon by photon and is
//! kept independent of that formula.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{binomial, NeumaierSum, RngStream};
use crate::states::{PhotonDistribution, PhotonNumbers};

/// Bins per arm in the two-arm detector this crate was built around.
pub const DEFAULT_BINS: u32 = 8;

/// Raw click probabilities below this are reported as instability.
pub const INSTABILITY_THRESHOLD: f64 = -1e-9;

/// Histogram entries down to this are treated as round-off and clamped.
pub const CLAMP_FLOOR: f64 = -1e-12;

/// Linear detector response of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorResponse {
    eta: f64,
    nu: f64,
    bins: u32,
}

impl DetectorResponse {
    pub fn new(eta: f64, nu: f64, bins: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain(format!("efficiency must lie in [0, 1], got {eta}")));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::domain(format!("dark-count parameter must be >= 0, got {nu}")));
        }
        if bins == 0 || bins > crate::numerics::MAX_BINOMIAL_N {
            return Err(Error::domain(format!("bin count must lie in 1..=64, got {bins}")));
        }
        Ok(Self { eta, nu, bins })
    }

    /// Perfect detector: unit efficiency, no dark counts.
    pub fn ideal(bins: u32) -> Result<Self> {
        Self::new(1.0, 0.0, bins)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    /// `⟨n| :m̂^l: |n⟩ = e^{−νl} (1 − ηl/N)ⁿ`.
    pub fn no_click_moment(&self, l: u32, n: usize) -> f64 {
        libm::exp(-self.nu * f64::from(l)) * libm::pow(self.silent_fraction(l), n as f64)
    }

    /// Per-photon probability `1 − ηl/N` of escaping detection in `l` given bins.
    pub fn silent_fraction(&self, l: u32) -> f64 {
        1.0 - self.eta * f64::from(l) / f64::from(self.bins)
    }
}

/// Whether a histogram came from counted trials or from theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trials {
    Analytic,
    Finite(u64),
}

impl Trials {
    pub fn count(&self) -> Option<u64> {
        match self {
            Trials::Analytic => None,
            Trials::Finite(r) => Some(*r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Joint click histogram `c_{k_A, k_B}` over `0..=N_A × 0..=N_B`, row-major in `k_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickStatistics {
    bins_a: u32,
    bins_b: u32,
    probs: Vec<f64>,
    trials: Trials,
}

impl ClickStatistics {
    /// Validates a probability table. Entries in `[−1e−12, 0)` are clamped to zero;
    /// anything more negative, or a total off by more than 1e−10, is rejected.
    pub fn new(bins_a: u32, bins_b: u32, mut probs: Vec<f64>, trials: Trials) -> Result<Self> {
        let cells = (bins_a as usize + 1) * (bins_b as usize + 1);
        if bins_a == 0 || bins_b == 0 || bins_a > 64 || bins_b > 64 {
            return Err(Error::domain(format!(
                "bin counts must lie in 1..=64, got {bins_a} and {bins_b}"
            )));
        }
        if probs.len() != cells {
            return Err(Error::domain(format!(
                "expected {cells} click probabilities, got {}",
                probs.len()
            )));
        }
        if trials == Trials::Finite(0) {
            return Err(Error::domain("trial count must be positive"));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::domain(format!("click probability {i} is not finite")));
            }
            if *p < CLAMP_FLOOR {
                return Err(Error::domain(format!(
                    "click probability {i} is negative ({p:e})"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total = probs.iter().copied().collect::<NeumaierSum>().value();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("click probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            bins_a,
            bins_b,
            probs,
            trials,
        })
    }

    /// Normalized histogram of raw counts; the trial count is their sum.
    pub fn from_counts(bins_a: u32, bins_b: u32, counts: &[u64]) -> Result<Self> {
        let trials: u64 = counts.iter().sum();
        if trials == 0 {
            return Err(Error::domain("histogram holds no counts"));
        }
        let probs = counts.iter().map(|c| *c as f64 / trials as f64).collect();
        Self::new(bins_a, bins_b, probs, Trials::Finite(trials))
    }

    pub fn bins_a(&self) -> u32 {
        self.bins_a
    }

    pub fn bins_b(&self) -> u32 {
        self.bins_b
    }

    pub fn trials(&self) -> Trials {
        self.trials
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, k_a: u32, k_b: u32) -> f64 {
        self.probs[k_a as usize * (self.bins_b as usize + 1) + k_b as usize]
    }

    pub fn with_trials(mut self, trials: Trials) -> Result<Self> {
        if trials == Trials::Finite(0) {
            return Err(Error::domain("trial count must be positive"));
        }
        self.trials = trials;
        Ok(self)
    }

    /// Histogram with the roles of A and B exchanged.
    pub fn transposed(&self) -> Self {
        let (na, nb) = (self.bins_a as usize + 1, self.bins_b as usize + 1);
        let mut probs = vec![0.0; na * nb];
        for a in 0..na {
            for b in 0..nb {
                probs[b * na + a] = self.probs[a * nb + b];
            }
        }
        Self {
            bins_a: self.bins_b,
            bins_b: self.bins_a,
            probs,
            trials: self.trials,
        }
    }

    /// Single-mode click distribution of one arm.
    pub fn marginal(&self, mode: Mode) -> Vec<f64> {
        let nb = self.bins_b as usize + 1;
        match mode {
            Mode::A => self.probs.chunks(nb).map(|row| row.iter().sum()).collect(),
            Mode::B => (0..nb)
                .map(|b| self.probs.iter().skip(b).step_by(nb).sum())
                .collect(),
        }
    }
}

/// Single-mode marginal of a joint histogram.
pub fn marginal(stats: &ClickStatistics, mode: Mode) -> Vec<f64> {
    stats.marginal(mode)
}

/// Closed-form click probabilities for `|n⟩` before any clamping.
pub fn fock_click_distribution_raw(n: usize, d: &DetectorResponse) -> Vec<f64> {
    let bins = d.bins;
    let silent: Vec<f64> = (0..=bins).map(|l| d.no_click_moment(l, n)).collect();
    (0..=bins)
        .map(|k| {
            let mut acc = NeumaierSum::new();
            for j in 0..=k {
                let term = binomial(k, j).expect("j <= k <= 64") as f64 * silent[(bins - k + j) as usize];
                acc.add(if j % 2 == 0 { term } else { -term });
            }
            binomial(bins, k).expect("k <= bins <= 64") as f64 * acc.value()
        })
        .collect()
}

/// Click-number distribution `c_0..c_N` for the Fock state `|n⟩`.
pub fn fock_click_distribution(n: usize, d: &DetectorResponse) -> Result<Vec<f64>> {
    let mut c = fock_click_distribution_raw(n, d);
    let worst = c.iter().copied().fold(0.0, f64::min);
    if worst < INSTABILITY_THRESHOLD {
        return Err(Error::numerical(
            format!(
                "alternating click sum for n = {n} lost precision; use the Monte Carlo path"
            ),
            worst,
        ));
    }
    c.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(c)
}

/// Single-mode click distribution for a photon-number distribution,
/// conditioned on the retained (untruncated) support.
pub fn single_mode_clicks(p: &PhotonNumbers, d: &DetectorResponse) -> Result<Vec<f64>> {
    let mut acc = vec![NeumaierSum::new(); d.bins as usize + 1];
    for (n, pn) in p.probs().iter().enumerate() {
        if *pn == 0.0 {
            continue;
        }
        for (a, c) in acc.iter_mut().zip(fock_click_distribution(n, d)?) {
            a.add(pn * c);
        }
    }
    let mass = p.retained_mass();
    Ok(acc.iter().map(|a| a.value() / mass).collect())
}

/// Analytic joint click statistics of a Fock-diagonal two-mode state.
pub fn joint_click_distribution(
    p: &PhotonDistribution,
    da: &DetectorResponse,
    db: &DetectorResponse,
) -> Result<ClickStatistics> {
    let (na, nb) = (da.bins as usize + 1, db.bins as usize + 1);
    let probs = match p {
        PhotonDistribution::CorrelatedDiagonal(pn) => {
            let mut acc = vec![NeumaierSum::new(); na * nb];
            for (n, w) in pn.probs().iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let ca = fock_click_distribution(n, da)?;
                let cb = fock_click_distribution(n, db)?;
                for (a, x) in ca.iter().enumerate() {
                    for (b, y) in cb.iter().enumerate() {
                        acc[a * nb + b].add(w * (x * y));
                    }
                }
            }
            let mass = pn.retained_mass();
            acc.iter().map(|a| a.value() / mass).collect()
        }
        PhotonDistribution::Product(pa, pb) => {
            let ca = single_mode_clicks(pa, da)?;
            let cb = single_mode_clicks(pb, db)?;
            ca.iter()
                .flat_map(|x| cb.iter().map(move |y| x * y))
                .collect()
        }
    };
    ClickStatistics::new(da.bins, db.bins, probs, Trials::Analytic)
}

/// Number of independent streams a Monte Carlo run is split into.
pub const MONTE_CARLO_STREAMS: u64 = 16;

/// Shot count of each `(stream, shots)` chunk of a Monte Carlo run.
///
/// Stream `i` of seed `s` always runs on `RngStream::with_stream(s, i)`, so
/// chunks can execute in any order or in parallel and the summed histogram
/// is identical.
pub fn monte_carlo_plan(shots: u64) -> Vec<(u64, u64)> {
    let base = shots / MONTE_CARLO_STREAMS;
    let extra = shots % MONTE_CARLO_STREAMS;
    (0..MONTE_CARLO_STREAMS)
        .map(|i| (i, base + u64::from(i < extra)))
        .filter(|(_, s)| *s > 0)
        .collect()
}

struct PhotonSampler<'a> {
    cumulative: Vec<f64>,
    source: &'a PhotonNumbers,
}

impl<'a> PhotonSampler<'a> {
    fn new(source: &'a PhotonNumbers) -> Self {
        let mut running = 0.0;
        let cumulative = source
            .probs()
            .iter()
            .map(|p| {
                running += p;
                running
            })
            .collect();
        Self { cumulative, source }
    }

    fn sample(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().expect("distribution is non-empty");
        let u = rng.uniform() * total;
        let idx = self.cumulative.partition_point(|c| *c <= u);
        idx.min(self.source.n_max())
    }
}

/// Clicking bins of one arm for `photons` incident photons.
fn simulate_arm(photons: usize, d: &DetectorResponse, dark_prob: f64, rng: &mut RngStream) -> u32 {
    let mut fired: u64 = 0;
    for bin in 0..d.bins {
        if dark_prob > 0.0 && rng.uniform() < dark_prob {
            fired |= 1 << bin;
        }
    }
    for _ in 0..photons {
        let bin = rng.below(d.bins);
        if d.eta >= 1.0 || rng.uniform() < d.eta {
            fired |= 1 << bin;
        }
    }
    fired.count_ones()
}

/// Raw Monte Carlo counts for one `(seed, stream)` chunk.
///
/// Every photon lands in a uniformly random bin and is detected with
/// probability η; each bin independently dark-clicks with probability
/// `1 − e^{−ν}`; a bin clicks on any detection or dark event.
pub fn monte_carlo_counts(
    p: &PhotonDistribution,
    da: &DetectorResponse,
    db: &DetectorResponse,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Vec<u64> {
    let nb = db.bins as usize + 1;
    let mut counts = vec![0u64; (da.bins as usize + 1) * nb];
    let mut rng = RngStream::with_stream(seed, stream);
    let dark_a = 1.0 - libm::exp(-da.nu);
    let dark_b = 1.0 - libm::exp(-db.nu);
    match p {
        PhotonDistribution::CorrelatedDiagonal(pn) => {
            let sampler = PhotonSampler::new(pn);
            for _ in 0..shots {
                let n = sampler.sample(&mut rng);
                let ka = simulate_arm(n, da, dark_a, &mut rng) as usize;
                let kb = simulate_arm(n, db, dark_b, &mut rng) as usize;
                counts[ka * nb + kb] += 1;
            }
        }
        PhotonDistribution::Product(pa, pb) => {
            let (sa, sb) = (PhotonSampler::new(pa), PhotonSampler::new(pb));
            for _ in 0..shots {
                let na = sa.sample(&mut rng);
                let nb_photons = sb.sample(&mut rng);
                let ka = simulate_arm(na, da, dark_a, &mut rng) as usize;
                let kb = simulate_arm(nb_photons, db, dark_b, &mut rng) as usize;
                counts[ka * nb + kb] += 1;
            }
        }
    }
    counts
}

/// Monte Carlo estimate of the joint click statistics; reproducible for a fixed seed.
pub fn monte_carlo_clicks(
    p: &PhotonDistribution,
    da: &DetectorResponse,
    db: &DetectorResponse,
    shots: u64,
    seed: u64,
) -> Result<ClickStatistics> {
    if shots == 0 {
        return Err(Error::domain("Monte Carlo needs at least one shot"));
    }
    let mut total = vec![0u64; (da.bins as usize + 1) * (db.bins as usize + 1)];
    for (stream, chunk) in monte_carlo_plan(shots) {
        for (t, c) in total
            .iter_mut()
            .zip(monte_carlo_counts(p, da, db, chunk, seed, stream))
        {
            *t += c;
        }
    }
    ClickStatistics::from_counts(da.bins, db.bins, &total)
}

/// Total-variation distance `½ Σ |p − q|` between two histograms of equal shape.
pub fn total_variation(a: &ClickStatistics, b: &ClickStatistics) -> Result<f64> {
    if a.bins_a != b.bins_a || a.bins_b != b.bins_b {
        return Err(Error::domain("histograms have different shapes"));
    }
    Ok(0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// The `5 √((M − 1)/shots)` acceptance bound on the total-variation distance
/// between an `M`-cell distribution and its empirical histogram.
pub fn total_variation_bound(cells: usize, shots: u64) -> f64 {
    5.0 * libm::sqrt((cells as f64 - 1.0) / shots as f64)
}
