//! Multi-threaded drivers around the deterministic core.
//!
//! Work is split by random stream, never by thread, so every result here is
//! bit-identical to its sequential counterpart in `clickstat_core`.

use std::num::NonZeroUsize;
use std::thread;

use clickstat_core::certify::{bootstrap_replicate, summarize_bootstrap, BootstrapCertificate, MIN_BOOTSTRAP_RESAMPLES};
use clickstat_core::clickmodel::{monte_carlo_counts, monte_carlo_plan, ClickStatistics, DetectorResponse};
use clickstat_core::numerics::{sample_multinomial, RngStream};
use clickstat_core::states::PhotonDistribution;
use clickstat_core::{Error, Result};

pub fn worker_count() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// `f` applied to every item on scoped threads, in input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = worker_count().min(items.len()).max(1);
    let chunk = items.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Parallel [`clickstat_core::clickmodel::monte_carlo_clicks`].
pub fn monte_carlo_clicks(
    p: &PhotonDistribution,
    da: &DetectorResponse,
    db: &DetectorResponse,
    shots: u64,
    seed: u64,
) -> Result<ClickStatistics> {
    if shots == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one shot".into()));
    }
    let chunks = par_map(&monte_carlo_plan(shots), |(stream, n)| {
        monte_carlo_counts(p, da, db, *n, seed, *stream)
    });
    let mut total = vec![0u64; (da.bins() as usize + 1) * (db.bins() as usize + 1)];
    for counts in chunks {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    ClickStatistics::from_counts(da.bins(), db.bins(), &total)
}

/// Multinomial histogram of `trials` draws from `stats` on stream `stream` of `seed`.
pub fn sample_histogram(stats: &ClickStatistics, trials: u64, seed: u64, stream: u64) -> Result<ClickStatistics> {
    if trials == 0 {
        return Err(Error::Domain("trial count must be positive".into()));
    }
    let counts = sample_multinomial(&mut RngStream::with_stream(seed, stream), trials, stats.probs());
    ClickStatistics::from_counts(stats.bins_a(), stats.bins_b(), &counts)
}

/// Parallel [`clickstat_core::certify::bootstrap_certificate`].
pub fn bootstrap_certificate(
    stats: &ClickStatistics,
    k_a: u32,
    k_b: u32,
    resamples: usize,
    seed: u64,
    threshold: f64,
) -> Result<BootstrapCertificate> {
    if resamples < MIN_BOOTSTRAP_RESAMPLES {
        return Err(Error::Domain(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP_RESAMPLES} resamples, got {resamples}"
        )));
    }
    let indices: Vec<u64> = (0..resamples as u64).collect();
    let replicates = par_map(&indices, |i| bootstrap_replicate(stats, k_a, k_b, seed, *i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    summarize_bootstrap(stats, k_a, k_b, threshold, &replicates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clickstat_core::certify::DEFAULT_THRESHOLD;
    use clickstat_core::clickmodel::{joint_click_distribution, Trials};
    use clickstat_core::states::tmsv_distribution;

    fn response() -> DetectorResponse {
        DetectorResponse::new(0.096, 0.51, 8).unwrap()
    }

    #[test]
    fn parallel_monte_carlo_matches_sequential() {
        let p = tmsv_distribution(1.0, 1e-12).unwrap();
        let d = response();
        let par = monte_carlo_clicks(&p, &d, &d, 20_003, 7).unwrap();
        let seq = clickstat_core::clickmodel::monte_carlo_clicks(&p, &d, &d, 20_003, 7).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn parallel_bootstrap_matches_sequential() {
        let d = response();
        let s = joint_click_distribution(&tmsv_distribution(1.0, 1e-12).unwrap(), &d, &d)
            .unwrap()
            .with_trials(Trials::Finite(100_000))
            .unwrap();
        let par = bootstrap_certificate(&s, 2, 2, 120, 3, DEFAULT_THRESHOLD).unwrap();
        let seq = clickstat_core::certify::bootstrap_certificate(&s, 2, 2, 120, 3, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn par_map_keeps_order() {
        let xs: Vec<u32> = (0..1000).collect();
        assert_eq!(par_map(&xs, |x| x * 2), xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert!(par_map(&[] as &[u32], |x| *x).is_empty());
    }
}
