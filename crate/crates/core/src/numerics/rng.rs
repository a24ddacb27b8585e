use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Reproducible uniform random source.
///
/// The generator is ChaCha8 keyed by `ChaCha8Rng::seed_from_u64(seed)` with
/// its 64-bit stream id set to `stream`. The output depends only on
/// `(seed, stream)`, never on platform or thread scheduling, so parallel
/// work splits into independent streams of one seed.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u32) -> u32 {
        self.0.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Multinomial counts for `trials` draws over `probs`, by sequential
/// conditional binomials. `probs` need not be exactly normalized; the
/// last nonzero cell absorbs the remainder.
pub fn sample_multinomial(rng: &mut RngStream, trials: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_trials = trials;
    let mut remaining_mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let last = probs.iter().rposition(|p| *p > 0.0);
    for (i, p) in probs.iter().enumerate() {
        if remaining_trials == 0 {
            break;
        }
        let p = p.max(0.0);
        if Some(i) == last {
            counts[i] = remaining_trials;
            break;
        }
        if p == 0.0 {
            continue;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining_trials, q)
            .expect("conditional probability lies in [0, 1]")
            .sample(rng);
        counts[i] = draw;
        remaining_trials -= draw;
        remaining_mass -= p;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seeds_identical_streams() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = RngStream::new(1);
        let mut b = RngStream::new(2);
        let same = (0..1000).filter(|_| a.uniform() == b.uniform()).count();
        assert!(same < 5);
    }

    #[test]
    fn streams_of_one_seed_differ() {
        let mut a = RngStream::with_stream(9, 0);
        let mut b = RngStream::with_stream(9, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_mean_within_three_standard_errors() {
        let n = 1_000_000;
        let mut rng = RngStream::new(2024);
        let mean = (0..n).map(|_| rng.uniform()).sum::<f64>() / n as f64;
        let sigma = 1.0 / libm::sqrt(12.0 * n as f64);
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn multinomial_conserves_trials() {
        let mut rng = RngStream::new(5);
        let probs = [0.1, 0.0, 0.25, 0.65];
        let counts = sample_multinomial(&mut rng, 1_000_000, &probs);
        assert_eq!(counts.iter().sum::<u64>(), 1_000_000);
        assert_eq!(counts[1], 0);
        for (c, p) in counts.iter().zip(probs) {
            let sd = libm::sqrt(1e6 * p * (1.0 - p));
            assert!((*c as f64 - 1e6 * p).abs() <= 5.0 * sd + 1.0);
        }
    }

    #[test]
    fn multinomial_point_mass() {
        let mut rng = RngStream::new(5);
        assert_eq!(sample_multinomial(&mut rng, 77, &[0.0, 1.0, 0.0]), vec![0, 77, 0]);
    }
}
