use clickstat_core::calibrate::{FitMode, FitOptions, FitReport};
use clickstat_core::clickmodel::Mode;
use clickstat_core::photoelectric::{ModelAssessment, ModelComparison};
use serde::{Deserialize, Serialize};

use super::{check_finite, check_version, invalid, JsonFile, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualEntry {
    #[serde(rename = "pump_power_uW")]
    pub pump_power_uw: f64,
    /// Model minus data.
    pub values: Vec<f64>,
}

/// Calibrated model parameters and the fit diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitFile {
    pub format_version: String,
    pub mode: String,
    pub asymmetric: bool,
    pub order: u32,
    pub eta: f64,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_b: Option<f64>,
    /// μW^(−1/2).
    pub xi0: f64,
    pub repetition_rate_hz: f64,
    pub sum_of_squares: f64,
    /// Mean total photon number at the lowest and highest pump power.
    pub mean_photons: (f64, f64),
    pub converged: bool,
    pub evaluations: usize,
    pub residuals: Vec<ResidualEntry>,
}

pub(crate) fn fit_mode_name(mode: FitMode) -> &'static str {
    match mode {
        FitMode::Moments => "moments",
        FitMode::Eigenvalues => "eigenvalues",
    }
}

impl FitFile {
    pub fn from_report(report: &FitReport, options: &FitOptions) -> Result<Self> {
        let p = &report.params;
        let file = Self {
            format_version: FORMAT_VERSION.into(),
            mode: fit_mode_name(options.mode).into(),
            asymmetric: options.asymmetric,
            order: options.order,
            eta: p.eta,
            nu: p.nu,
            eta_b: p.arm_b.map(|b| b.eta),
            nu_b: p.arm_b.map(|b| b.nu),
            xi0: p.xi0,
            repetition_rate_hz: p.repetition_rate_hz,
            sum_of_squares: report.sum_of_squares,
            mean_photons: report.mean_photon_range,
            converged: report.converged,
            evaluations: report.evaluations,
            residuals: report
                .residuals
                .iter()
                .map(|r| ResidualEntry {
                    pump_power_uw: r.power_uw,
                    values: r.residuals.clone(),
                })
                .collect(),
        };
        file.validate()?;
        Ok(file)
    }
}

impl JsonFile for FitFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        if !["moments", "eigenvalues"].contains(&self.mode.as_str()) {
            return Err(invalid("mode", format_args!("unknown fit mode \"{}\"", self.mode)));
        }
        for (field, x) in [
            ("eta", self.eta),
            ("nu", self.nu),
            ("xi0", self.xi0),
            ("repetition_rate_hz", self.repetition_rate_hz),
            ("sum_of_squares", self.sum_of_squares),
            ("mean_photons[0]", self.mean_photons.0),
            ("mean_photons[1]", self.mean_photons.1),
        ] {
            check_finite(field, x)?;
        }
        for (field, x) in [("eta_b", self.eta_b), ("nu_b", self.nu_b)] {
            if let Some(x) = x {
                check_finite(field, x)?;
            }
        }
        for (i, r) in self.residuals.iter().enumerate() {
            check_finite(&format!("residuals[{i}].pump_power_uW"), r.pump_power_uw)?;
            for (j, x) in r.values.iter().enumerate() {
                check_finite(&format!("residuals[{i}].values[{j}]"), *x)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub e: f64,
    #[serde(rename = "dE")]
    pub de: Option<f64>,
    pub sigma: Option<f64>,
    pub nonclassical: bool,
    pub vector: Vec<f64>,
}

impl ModelEntry {
    fn new(m: &ModelAssessment) -> Self {
        Self {
            e: m.value,
            de: m.uncertainty,
            sigma: m.significance,
            nonclassical: m.nonclassical,
            vector: m.vector.clone(),
        }
    }

    fn validate(&self, prefix: &str) -> Result<()> {
        check_finite(&format!("{prefix}.e"), self.e)?;
        if let Some(x) = self.de {
            check_finite(&format!("{prefix}.dE"), x)?;
        }
        if let Some(x) = self.sigma {
            check_finite(&format!("{prefix}.sigma"), x)?;
        }
        for (i, x) in self.vector.iter().enumerate() {
            check_finite(&format!("{prefix}.vector[{i}]"), *x)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub mode: String,
    pub click: ModelEntry,
    pub photoelectric: ModelEntry,
    pub disagreement: bool,
}

/// Click-model versus photoelectric-model verdicts for one histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonFile {
    pub format_version: String,
    pub order: u32,
    pub threshold: f64,
    pub modes: Vec<ModeEntry>,
}

impl ComparisonFile {
    pub fn from_comparison(c: &ModelComparison) -> Result<Self> {
        let file = Self {
            format_version: FORMAT_VERSION.into(),
            order: c.order,
            threshold: c.threshold,
            modes: c
                .modes
                .iter()
                .map(|m| ModeEntry {
                    mode: match m.mode {
                        Mode::A => "A",
                        Mode::B => "B",
                    }
                    .into(),
                    click: ModelEntry::new(&m.click),
                    photoelectric: ModelEntry::new(&m.photoelectric),
                    disagreement: m.disagreement,
                })
                .collect(),
        };
        file.validate()?;
        Ok(file)
    }
}

impl JsonFile for ComparisonFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        check_finite("threshold", self.threshold)?;
        for (i, m) in self.modes.iter().enumerate() {
            if m.mode != "A" && m.mode != "B" {
                return Err(invalid(format!("modes[{i}].mode"), "must be \"A\" or \"B\""));
            }
            m.click.validate(&format!("modes[{i}].click"))?;
            m.photoelectric.validate(&format!("modes[{i}].photoelectric"))?;
        }
        Ok(())
    }
}

/// Analytic versus Monte Carlo agreement for one state and response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub format_version: String,
    pub state: String,
    pub shots: u64,
    pub seed: u64,
    pub total_variation: f64,
    pub bound: f64,
    pub pass: bool,
}

impl JsonFile for OracleFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        check_finite("total_variation", self.total_variation)?;
        check_finite("bound", self.bound)
    }
}
