use std::path::Path;

use clickstat_core::calibrate::SweepPoint;
use clickstat_core::states::PumpSetting;
use serde::{Deserialize, Serialize};

use super::{check_finite, check_version, invalid, HistogramFile, JsonFile, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    #[serde(rename = "pump_power_uW")]
    pub pump_power_uw: f64,
    pub histogram: HistogramFile,
}

/// Histograms recorded at several pump powers with one pulse repetition rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub format_version: String,
    pub repetition_rate_hz: f64,
    pub points: Vec<SweepEntry>,
}

impl SweepFile {
    pub fn new(repetition_rate_hz: f64, points: Vec<SweepEntry>) -> Result<Self> {
        let file = Self {
            format_version: FORMAT_VERSION.into(),
            repetition_rate_hz,
            points,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn to_sweep_points(&self) -> Result<Vec<SweepPoint>> {
        self.validate()?;
        self.points
            .iter()
            .map(|p| {
                Ok(SweepPoint::new(
                    PumpSetting::new(p.pump_power_uw, self.repetition_rate_hz)?,
                    p.histogram.to_stats()?,
                ))
            })
            .collect()
    }
}

impl JsonFile for SweepFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        check_finite("repetition_rate_hz", self.repetition_rate_hz)?;
        if self.repetition_rate_hz <= 0.0 {
            return Err(invalid("repetition_rate_hz", "must be > 0"));
        }
        let Some(first) = self.points.first() else {
            return Err(invalid("points", "a sweep needs at least one point"));
        };
        for (i, p) in self.points.iter().enumerate() {
            let field = format!("points[{i}].pump_power_uW");
            check_finite(&field, p.pump_power_uw)?;
            if p.pump_power_uw < 0.0 {
                return Err(invalid(field, "must be >= 0"));
            }
            p.histogram.validate().map_err(|e| match e {
                super::IoError::Invalid { field, message } => {
                    invalid(format!("points[{i}].histogram.{field}"), message)
                }
                other => other,
            })?;
            if (p.histogram.bins_a, p.histogram.bins_b) != (first.histogram.bins_a, first.histogram.bins_b) {
                return Err(invalid(
                    format!("points[{i}].histogram"),
                    "bin counts differ from the first point",
                ));
            }
        }
        Ok(())
    }
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepPoint>> {
    SweepFile::read(path)?.to_sweep_points()
}
