//! Simulated pump-power sweeps for testing calibration and certification.

use clickstat_core::calibrate::{ModelParameters, SweepPoint};
use clickstat_core::clickmodel::{joint_click_distribution, ClickStatistics};
use clickstat_core::states::{tmsv_distribution, PumpSetting};
use clickstat_core::Result;

use crate::parallel::{par_map, sample_histogram};

/// Truncation tail of the photon-number distributions behind simulated sweeps.
pub const SWEEP_TAIL_TOLERANCE: f64 = 1e-13;

/// Exact click statistics of the model at one pump power in μW.
pub fn analytic_statistics(params: &ModelParameters, power_uw: f64) -> Result<ClickStatistics> {
    params.validate()?;
    let (da, db) = params.responses()?;
    let xi = params.xi0 * power_uw.max(0.0).sqrt();
    joint_click_distribution(&tmsv_distribution(xi, SWEEP_TAIL_TOLERANCE)?, &da, &db)
}

/// A sweep with `trials` multinomial draws per point; point `i` uses
/// stream `i` of `seed`. With `trials = None` the points are analytic.
pub fn model_sweep(
    params: &ModelParameters,
    powers_uw: &[f64],
    trials: Option<u64>,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    let indexed: Vec<(u64, f64)> = powers_uw.iter().enumerate().map(|(i, p)| (i as u64, *p)).collect();
    par_map(&indexed, |(i, power)| {
        let pump = PumpSetting::new(*power, params.repetition_rate_hz)?;
        let exact = analytic_statistics(params, *power)?;
        let stats = match trials {
            Some(r) => sample_histogram(&exact, r, seed, *i)?,
            None => exact,
        };
        Ok(SweepPoint::new(pump, stats))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clickstat_core::clickmodel::Trials;

    #[test]
    fn sampled_sweep_is_reproducible() {
        let params = ModelParameters::symmetric(0.096, 0.51, 0.087, 70e3).unwrap();
        let a = model_sweep(&params, &[50.0, 403.0], Some(10_000), 5).unwrap();
        let b = model_sweep(&params, &[50.0, 403.0], Some(10_000), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].stats.trials(), Trials::Finite(10_000));
        assert_ne!(a[0].stats, a[1].stats);
        let exact = model_sweep(&params, &[50.0], None, 0).unwrap();
        assert_eq!(exact[0].stats.trials(), Trials::Analytic);
    }
}
