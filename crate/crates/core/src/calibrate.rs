//! Pump-energy curves of the second-order eigenvalues, their saturation,
//! and least-squares calibration of `(η, ν, ξ₀)` against a sweep.

use alloc::format;
use alloc::vec::Vec;

use crate::certify::{certify_moments, Certificate, DEFAULT_THRESHOLD};
use crate::clickmodel::{ClickStatistics, DetectorResponse, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::moments::{sample_moments, tmsv_moments, MomentTable};
use crate::numerics::{fit_least_squares_with, SimplexOptions};
use crate::states::{mean_total_photons, PumpSetting};

/// Efficiency and dark parameter of one detector arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmResponse {
    pub eta: f64,
    pub nu: f64,
}

/// Physical model of a pumped source feeding two click detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParameters {
    /// Efficiency of arm A, and of arm B unless `arm_b` is set.
    pub eta: f64,
    /// Dark parameter of arm A, and of arm B unless `arm_b` is set.
    pub nu: f64,
    /// Squeezing per root power, in μW^(−1/2).
    pub xi0: f64,
    pub repetition_rate_hz: f64,
    pub bins: u32,
    pub arm_b: Option<ArmResponse>,
}

impl ModelParameters {
    pub fn symmetric(eta: f64, nu: f64, xi0: f64, repetition_rate_hz: f64) -> Result<Self> {
        let p = Self {
            eta,
            nu,
            xi0,
            repetition_rate_hz,
            bins: DEFAULT_BINS,
            arm_b: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.responses()?;
        if !(self.xi0 >= 0.0 && self.xi0.is_finite()) {
            return Err(Error::domain(format!("xi0 must be >= 0, got {}", self.xi0)));
        }
        PumpSetting::new(0.0, self.repetition_rate_hz)?;
        Ok(())
    }

    pub fn arm_a(&self) -> ArmResponse {
        ArmResponse {
            eta: self.eta,
            nu: self.nu,
        }
    }

    pub fn arm_b(&self) -> ArmResponse {
        self.arm_b.unwrap_or(self.arm_a())
    }

    pub fn responses(&self) -> Result<(DetectorResponse, DetectorResponse)> {
        let (a, b) = (self.arm_a(), self.arm_b());
        Ok((
            DetectorResponse::new(a.eta, a.nu, self.bins)?,
            DetectorResponse::new(b.eta, b.nu, self.bins)?,
        ))
    }

    fn xi(&self, power_uw: f64) -> f64 {
        self.xi0 * libm::sqrt(power_uw)
    }

    /// Analytic moment table at one pump power.
    pub fn moments_at(&self, power_uw: f64) -> Result<MomentTable> {
        let (da, db) = self.responses()?;
        tmsv_moments(self.xi(power_uw), &da, &db)
    }
}

/// One sample of a theory curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub energy_j: f64,
    pub power_uw: f64,
    pub xi: f64,
    /// `⟨n̂_A + n̂_B⟩ = 2 sinh²ξ`.
    pub mean_photons: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_ab: f64,
}

/// A measured or simulated histogram at a known pump setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub pump: PumpSetting,
    pub stats: ClickStatistics,
    pub certificate: Option<Certificate>,
}

impl SweepPoint {
    pub fn new(pump: PumpSetting, stats: ClickStatistics) -> Self {
        Self {
            pump,
            stats,
            certificate: None,
        }
    }
}

/// Theory point at pulse energy `energy_j`, in joules.
pub fn predict_point(params: &ModelParameters, energy_j: f64, k: u32) -> Result<CurvePoint> {
    if !(energy_j > 0.0 && energy_j.is_finite()) {
        return Err(Error::domain(format!("pump energy must be > 0 J, got {energy_j}")));
    }
    let pump = PumpSetting::from_energy(energy_j, params.repetition_rate_hz)?;
    let xi = params.xi(pump.power_uw);
    let cert = certify_moments(&params.moments_at(pump.power_uw)?, k, k, DEFAULT_THRESHOLD)?;
    Ok(CurvePoint {
        energy_j,
        power_uw: pump.power_uw,
        xi,
        mean_photons: mean_total_photons(xi),
        e_a: cert.a.value,
        e_b: cert.b.value,
        e_ab: cert.ab.value,
    })
}

/// Minimal eigenvalues at order `(K, K)` along a list of pulse energies in joules.
pub fn predict_curve(params: &ModelParameters, energies_j: &[f64], k: u32) -> Result<Vec<CurvePoint>> {
    params.validate()?;
    energies_j.iter().map(|e| predict_point(params, *e, k)).collect()
}

/// `count` energies spaced evenly in log scale from `e_min` to `e_max`.
pub fn log_grid(e_min: f64, e_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(e_min > 0.0 && e_max > e_min && e_max.is_finite()) || count < 2 {
        return Err(Error::domain(format!(
            "log grid needs 0 < e_min < e_max and at least 2 points, got [{e_min}, {e_max}] x {count}"
        )));
    }
    let (lo, hi) = (libm::log(e_min), libm::log(e_max));
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                e_min
            } else if i + 1 == count {
                e_max
            } else {
                libm::exp(lo + (hi - lo) * i as f64 / (count - 1) as f64)
            }
        })
        .collect())
}

/// Theory curve continued into saturation.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationScan {
    pub curve: Vec<CurvePoint>,
    pub minimum_index: usize,
    pub minimum_energy_j: f64,
    /// The minimum lies strictly inside the scanned range.
    pub interior_minimum: bool,
    /// `e_AB` never decreases after the minimum.
    pub monotone_after_minimum: bool,
    pub negative_throughout: bool,
}

/// Points and lower end of the default saturation grid.
pub const SATURATION_GRID_POINTS: usize = 241;
pub const SATURATION_GRID_SPAN: f64 = 1e3;

/// [`saturation_scan_with`] on the default log grid `e_max / 1000 ..= e_max`.
pub fn saturation_scan(params: &ModelParameters, e_max_j: f64, k: u32) -> Result<SaturationScan> {
    saturation_scan_with(params, e_max_j / SATURATION_GRID_SPAN, e_max_j, SATURATION_GRID_POINTS, k)
}

pub fn saturation_scan_with(
    params: &ModelParameters,
    e_min_j: f64,
    e_max_j: f64,
    points: usize,
    k: u32,
) -> Result<SaturationScan> {
    let curve = predict_curve(params, &log_grid(e_min_j, e_max_j, points)?, k)?;
    let minimum_index = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.e_ab.total_cmp(&b.1.e_ab))
        .map(|(i, _)| i)
        .expect("grid has at least two points");
    let monotone_after_minimum = curve[minimum_index..].windows(2).all(|w| w[1].e_ab >= w[0].e_ab);
    Ok(SaturationScan {
        minimum_energy_j: curve[minimum_index].energy_j,
        interior_minimum: minimum_index > 0 && minimum_index + 1 < curve.len(),
        monotone_after_minimum,
        negative_throughout: curve.iter().all(|p| p.e_ab < 0.0),
        minimum_index,
        curve,
    })
}

/// Quantities compared between model and data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// `⟨:m̂_A:⟩, ⟨:m̂_B:⟩, ⟨:m̂_A²:⟩, ⟨:m̂_B²:⟩, ⟨:m̂_A m̂_B:⟩` per point.
    #[default]
    Moments,
    /// `e_A, e_B, e_AB` at the configured order per point.
    Eigenvalues,
}

/// Box constraints on the fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitBounds {
    pub eta: (f64, f64),
    pub nu: (f64, f64),
    pub xi0: (f64, f64),
}

impl Default for FitBounds {
    fn default() -> Self {
        Self {
            eta: (1e-4, 1.0),
            nu: (0.0, 5.0),
            xi0: (1e-4, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub mode: FitMode,
    /// Fit separate `(η, ν)` for each arm.
    pub asymmetric: bool,
    /// Order `K` of the eigenvalues in [`FitMode::Eigenvalues`].
    pub order: u32,
    pub bounds: FitBounds,
    pub simplex: SimplexOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            mode: FitMode::Moments,
            asymmetric: false,
            order: 2,
            bounds: FitBounds::default(),
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResidual {
    pub power_uw: f64,
    /// Model minus data, in the order of the [`FitMode`] quantities.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub params: ModelParameters,
    pub residuals: Vec<PointResidual>,
    pub sum_of_squares: f64,
    /// Mean total photon number at the lowest and highest pump power.
    pub mean_photon_range: (f64, f64),
    pub evaluations: usize,
    pub converged: bool,
}

fn targets(table: &MomentTable, mode: FitMode, order: u32) -> Result<Vec<f64>> {
    match mode {
        FitMode::Moments => Ok([(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
            .into_iter()
            .map(|(a, b)| table.get(a, b))
            .collect()),
        FitMode::Eigenvalues => {
            let c = certify_moments(table, order, order, DEFAULT_THRESHOLD)?;
            Ok([c.a.value, c.b.value, c.ab.value].into())
        }
    }
}

fn unpack(x: &[f64], base: &ModelParameters, asymmetric: bool) -> ModelParameters {
    let mut p = *base;
    if asymmetric {
        p.eta = x[0];
        p.nu = x[1];
        p.arm_b = Some(ArmResponse { eta: x[2], nu: x[3] });
        p.xi0 = x[4];
    } else {
        p.eta = x[0];
        p.nu = x[1];
        p.arm_b = None;
        p.xi0 = x[2];
    }
    p
}

/// Least-squares calibration of the model against a sweep.
///
/// Points are sorted by pump power first, so the result does not depend on
/// their order. The repetition rate and bin count are taken from `init`.
pub fn fit_parameters(sweep: &[SweepPoint], init: &ModelParameters, options: &FitOptions) -> Result<FitReport> {
    if sweep.len() < 3 {
        return Err(Error::IllPosed(format!(
            "a fit of three parameters needs at least 3 sweep points, got {}",
            sweep.len()
        )));
    }
    let mut points: Vec<&SweepPoint> = sweep.iter().collect();
    points.sort_by(|a, b| {
        a.pump
            .power_uw
            .total_cmp(&b.pump.power_uw)
            .then_with(|| {
                a.stats
                    .probs()
                    .iter()
                    .zip(b.stats.probs())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
    });
    let (lo, hi) = (points[0].pump.power_uw, points[points.len() - 1].pump.power_uw);
    if lo == hi {
        return Err(Error::IllPosed(format!(
            "every sweep point has the same pump power {lo} μW"
        )));
    }
    let mut base = *init;
    base.bins = points[0].stats.bins_a();
    for p in &points {
        if p.stats.bins_a() != base.bins || p.stats.bins_b() != base.bins {
            return Err(Error::domain(format!(
                "sweep histograms must all be {0}x{0} bins, found {1}x{2}",
                base.bins,
                p.stats.bins_a(),
                p.stats.bins_b()
            )));
        }
    }
    if options.mode == FitMode::Eigenvalues {
        crate::moments::check_orders(options.order, options.order, base.bins, base.bins)?;
    }
    base.validate()?;

    let measured: Vec<Vec<f64>> = points
        .iter()
        .map(|p| targets(&sample_moments(&p.stats), options.mode, options.order))
        .collect::<Result<_>>()?;

    let b = options.bounds;
    let (x0, bounds): (Vec<f64>, Vec<(f64, f64)>) = if options.asymmetric {
        let arm_b = base.arm_b();
        (
            [base.eta, base.nu, arm_b.eta, arm_b.nu, base.xi0].into(),
            [b.eta, b.nu, b.eta, b.nu, b.xi0].into(),
        )
    } else {
        ([base.eta, base.nu, base.xi0].into(), [b.eta, b.nu, b.xi0].into())
    };

    let residuals_at = |x: &[f64]| -> Result<Vec<Vec<f64>>> {
        let params = unpack(x, &base, options.asymmetric);
        points
            .iter()
            .zip(&measured)
            .map(|(p, data)| {
                let model = targets(&params.moments_at(p.pump.power_uw)?, options.mode, options.order)?;
                Ok(model.iter().zip(data).map(|(m, d)| m - d).collect())
            })
            .collect()
    };
    let outcome = fit_least_squares_with(
        |x| match residuals_at(x) {
            Ok(r) => r.concat(),
            Err(_) => alloc::vec![f64::NAN],
        },
        &x0,
        &bounds,
        options.simplex,
    )?;

    let params = unpack(&outcome.params, &base, options.asymmetric);
    let residuals = points
        .iter()
        .zip(residuals_at(&outcome.params)?)
        .map(|(p, r)| PointResidual {
            power_uw: p.pump.power_uw,
            residuals: r,
        })
        .collect();
    Ok(FitReport {
        mean_photon_range: (
            mean_total_photons(params.xi(lo)),
            mean_total_photons(params.xi(hi)),
        ),
        params,
        residuals,
        sum_of_squares: outcome.sum_of_squares,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clickmodel::Trials;
    use alloc::vec;

    fn fitted() -> ModelParameters {
        ModelParameters::symmetric(0.096, 0.51, 0.087, 70e3).unwrap()
    }

    fn analytic_sweep(params: &ModelParameters, powers: &[f64]) -> Vec<SweepPoint> {
        powers
            .iter()
            .map(|p| {
                let table = params.moments_at(*p).unwrap();
                let (da, db) = params.responses().unwrap();
                let xi = params.xi(*p);
                let probs = crate::clickmodel::joint_click_distribution(
                    &crate::states::tmsv_distribution(xi, 1e-13).unwrap(),
                    &da,
                    &db,
                )
                .unwrap();
                assert!((sample_moments(&probs).get(1, 1) - table.get(1, 1)).abs() < 1e-10);
                SweepPoint::new(PumpSetting::new(*p, params.repetition_rate_hz).unwrap(), probs)
            })
            .collect()
    }

    #[test]
    fn mean_photons_at_sweep_endpoints() {
        let p = fitted();
        let lo = predict_point(&p, 50e-6 / 70e3, 2).unwrap();
        let hi = predict_point(&p, 403e-6 / 70e3, 2).unwrap();
        assert!((lo.mean_photons - 0.86).abs() < 0.01 * 0.86, "{lo:?}");
        assert!((hi.mean_photons - 15.4).abs() < 0.01 * 15.4, "{hi:?}");
        assert!((lo.power_uw - 50.0).abs() < 1e-9);
    }

    #[test]
    fn zero_squeezing_is_vacuum() {
        let p = ModelParameters::symmetric(0.3, 0.0, 0.0, 70e3).unwrap();
        for pt in predict_curve(&p, &[1e-9, 5e-9], 2).unwrap() {
            assert_eq!(pt.mean_photons, 0.0);
            for e in [pt.e_a, pt.e_b, pt.e_ab] {
                assert!(e.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pump_range_is_nonclassical_only_jointly() {
        let energies = log_grid(0.7e-9, 5.8e-9, 12).unwrap();
        for pt in predict_curve(&fitted(), &energies, 2).unwrap() {
            assert!(pt.e_a >= -1e-10 && pt.e_b >= -1e-10, "{pt:?}");
            assert!(pt.e_ab < 0.0, "{pt:?}");
        }
    }

    #[test]
    fn saturation_shape() {
        let scan = saturation_scan(&fitted(), 20.0 * 5.76e-9, 2).unwrap();
        assert!(scan.interior_minimum && scan.monotone_after_minimum && scan.negative_throughout);
        assert!(scan.minimum_energy_j > 5.76e-9);
    }

    #[test]
    fn dark_free_blind_detector_is_flat() {
        let p = ModelParameters::symmetric(0.0, 0.0, 0.087, 70e3).unwrap();
        let scan = saturation_scan(&p, 1e-7, 2).unwrap();
        assert!(scan.curve.iter().all(|pt| pt.e_ab.abs() < 1e-15));
    }

    #[test]
    fn smaller_efficiency_weakens_correlations() {
        let e = 3e-9;
        let mut last = f64::NEG_INFINITY;
        for eta in [0.3, 0.096, 0.02] {
            let mut p = fitted();
            p.eta = eta;
            let pt = predict_point(&p, e, 2).unwrap();
            assert!(pt.e_ab < 0.0 && pt.e_ab > last, "eta={eta}: {pt:?}");
            last = pt.e_ab;
        }
    }

    #[test]
    fn noiseless_fit_recovers_parameters() {
        let truth = fitted();
        let sweep = analytic_sweep(&truth, &[50.0, 150.0, 250.0, 403.0]);
        let mut init = truth;
        init.eta *= 1.3;
        init.nu *= 0.7;
        init.xi0 *= 1.2;
        let report = fit_parameters(&sweep, &init, &FitOptions::default()).unwrap();
        assert!((report.params.eta - 0.096).abs() < 1e-6, "{report:?}");
        assert!((report.params.nu - 0.51).abs() < 1e-6);
        assert!((report.params.xi0 - 0.087).abs() < 1e-6);
        assert!((report.mean_photon_range.0 - 0.86).abs() < 0.01);
    }

    #[test]
    fn fit_is_order_invariant() {
        let truth = fitted();
        let mut sweep = analytic_sweep(&truth, &[50.0, 200.0, 403.0]);
        let mut init = truth;
        init.eta = 0.12;
        let opts = FitOptions {
            simplex: SimplexOptions {
                max_evaluations: 300,
                ..SimplexOptions::default()
            },
            ..FitOptions::default()
        };
        let a = fit_parameters(&sweep, &init, &opts).unwrap();
        sweep.reverse();
        let b = fit_parameters(&sweep, &init, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_sweeps_are_ill_posed() {
        let truth = fitted();
        let sweep = analytic_sweep(&truth, &[100.0, 100.0, 100.0]);
        assert!(matches!(
            fit_parameters(&sweep, &truth, &FitOptions::default()),
            Err(Error::IllPosed(_))
        ));
        let short = analytic_sweep(&truth, &[100.0, 200.0]);
        assert!(matches!(
            fit_parameters(&short, &truth, &FitOptions::default()),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn eigenvalue_mode_and_asymmetric_arms() {
        let mut truth = fitted();
        truth.arm_b = Some(ArmResponse { eta: 0.08, nu: 0.4 });
        let sweep = analytic_sweep(&truth, &[50.0, 100.0, 200.0, 300.0, 403.0]);
        let opts = FitOptions {
            asymmetric: true,
            ..FitOptions::default()
        };
        let mut init = fitted();
        init.xi0 = 0.09;
        let report = fit_parameters(&sweep, &init, &opts).unwrap();
        let b = report.params.arm_b.unwrap();
        assert!((b.eta - 0.08).abs() < 1e-5 && (b.nu - 0.4).abs() < 1e-5, "{report:?}");

        let sym = analytic_sweep(&fitted(), &[50.0, 150.0, 250.0, 403.0]);
        let opts = FitOptions {
            mode: FitMode::Eigenvalues,
            ..FitOptions::default()
        };
        let report = fit_parameters(&sym, &init, &opts).unwrap();
        assert!(report.sum_of_squares < 1e-20, "{report:?}");
        assert_eq!(report.residuals[0].residuals.len(), 3);
    }

    #[test]
    fn rejects_mismatched_bins() {
        let truth = fitted();
        let mut sweep = analytic_sweep(&truth, &[50.0, 100.0, 200.0]);
        sweep[1].stats = ClickStatistics::new(4, 4, vec![1.0 / 25.0; 25], Trials::Analytic).unwrap();
        assert!(matches!(
            fit_parameters(&sweep, &truth, &FitOptions::default()),
            Err(Error::Domain(_))
        ));
    }
}
