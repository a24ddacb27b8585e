use std::collections::BTreeMap;
use std::path::Path;

use clickstat_core::clickmodel::{ClickStatistics, Trials};
use serde::{Deserialize, Serialize};

use super::{check_finite, check_version, invalid, JsonFile, Result, FORMAT_VERSION};

/// Experimental context stored next to a histogram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramMeta {
    #[serde(rename = "pump_power_uW", default, skip_serializing_if = "Option::is_none")]
    pub pump_power_uw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetition_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl HistogramMeta {
    fn validate(&self) -> Result<()> {
        if let Some(p) = self.pump_power_uw {
            check_finite("meta.pump_power_uW", p)?;
            if p < 0.0 {
                return Err(invalid("meta.pump_power_uW", format_args!("must be >= 0, got {p}")));
            }
        }
        if let Some(r) = self.repetition_rate_hz {
            check_finite("meta.repetition_rate_hz", r)?;
            if r <= 0.0 {
                return Err(invalid("meta.repetition_rate_hz", format_args!("must be > 0, got {r}")));
            }
        }
        Ok(())
    }
}

/// A joint click histogram: raw `counts` with their `trials` total, or
/// analytic `probs` (optionally with an assumed trial count).
///
/// Rows run over `k_A = 0..=bins_a`, columns over `k_B = 0..=bins_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramFile {
    pub format_version: String,
    pub bins_a: u32,
    pub bins_b: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<HistogramMeta>,
}

fn check_shape<T>(field: &str, rows: &[Vec<T>], bins_a: u32, bins_b: u32) -> Result<()> {
    if rows.len() != bins_a as usize + 1 {
        return Err(invalid(
            field,
            format_args!("expected {} rows (bins_a + 1), found {}", bins_a + 1, rows.len()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != bins_b as usize + 1 {
            return Err(invalid(
                format!("{field}[{i}]"),
                format_args!("expected {} entries (bins_b + 1), found {}", bins_b + 1, row.len()),
            ));
        }
    }
    Ok(())
}

impl HistogramFile {
    /// Stores `stats` as counts when they are exact integer frequencies of
    /// the trial count, and as probabilities otherwise.
    pub fn from_stats(stats: &ClickStatistics, meta: Option<HistogramMeta>) -> Result<Self> {
        let nb = stats.bins_b() as usize + 1;
        for (i, p) in stats.probs().iter().enumerate() {
            check_finite(&format!("probs[{}][{}]", i / nb, i % nb), *p)?;
        }
        let mut file = Self {
            format_version: FORMAT_VERSION.into(),
            bins_a: stats.bins_a(),
            bins_b: stats.bins_b(),
            counts: None,
            probs: None,
            trials: stats.trials().count(),
            meta,
        };
        let exact_counts = file.trials.and_then(|r| {
            let counts: Vec<u64> = stats.probs().iter().map(|p| (p * r as f64).round() as u64).collect();
            let reproduces = counts.iter().sum::<u64>() == r
                && counts
                    .iter()
                    .zip(stats.probs())
                    .all(|(c, p)| (*c as f64 / r as f64).to_bits() == p.to_bits());
            reproduces.then_some(counts)
        });
        match exact_counts {
            Some(counts) => file.counts = Some(counts.chunks(nb).map(<[u64]>::to_vec).collect()),
            None => file.probs = Some(stats.probs().chunks(nb).map(<[f64]>::to_vec).collect()),
        }
        file.validate()?;
        Ok(file)
    }

    /// Builds the histogram from raw counts.
    pub fn from_counts(bins_a: u32, bins_b: u32, counts: &[u64], meta: Option<HistogramMeta>) -> Result<Self> {
        let nb = bins_b as usize + 1;
        let file = Self {
            format_version: FORMAT_VERSION.into(),
            bins_a,
            bins_b,
            counts: Some(counts.chunks(nb).map(<[u64]>::to_vec).collect()),
            probs: None,
            trials: Some(counts.iter().sum()),
            meta,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn to_stats(&self) -> Result<ClickStatistics> {
        self.validate()?;
        match (&self.counts, &self.probs) {
            (Some(counts), None) => {
                let flat: Vec<u64> = counts.concat();
                Ok(ClickStatistics::from_counts(self.bins_a, self.bins_b, &flat)?)
            }
            (None, Some(probs)) => {
                let trials = self.trials.map_or(Trials::Analytic, Trials::Finite);
                ClickStatistics::new(self.bins_a, self.bins_b, probs.concat(), trials).map_err(|e| invalid("probs", e))
            }
            _ => unreachable!("validate admits exactly one of counts and probs"),
        }
    }
}

impl JsonFile for HistogramFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        for (field, bins) in [("bins_a", self.bins_a), ("bins_b", self.bins_b)] {
            if !(1..=64).contains(&bins) {
                return Err(invalid(field, format_args!("must lie in 1..=64, got {bins}")));
            }
        }
        match (&self.counts, &self.probs) {
            (Some(counts), None) => {
                check_shape("counts", counts, self.bins_a, self.bins_b)?;
                let total = counts
                    .iter()
                    .flatten()
                    .try_fold(0u64, |acc, c| acc.checked_add(*c))
                    .ok_or_else(|| invalid("counts", "total overflows 64 bits"))?;
                match self.trials {
                    None => return Err(invalid("trials", "required alongside counts")),
                    Some(t) if t != total => {
                        return Err(invalid("trials", format_args!("is {t} but the counts sum to {total}")))
                    }
                    Some(0) => return Err(invalid("trials", "histogram holds no counts")),
                    Some(_) => {}
                }
            }
            (None, Some(probs)) => {
                check_shape("probs", probs, self.bins_a, self.bins_b)?;
                for (i, row) in probs.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        check_finite(&format!("probs[{i}][{j}]"), *p)?;
                    }
                }
                if self.trials == Some(0) {
                    return Err(invalid("trials", "must be positive"));
                }
                ClickStatistics::new(self.bins_a, self.bins_b, probs.concat(), Trials::Analytic)
                    .map_err(|e| invalid("probs", e))?;
            }
            (Some(_), Some(_)) => return Err(invalid("probs", "give either counts or probs, not both")),
            (None, None) => return Err(invalid("counts", "one of counts or probs is required")),
        }
        if let Some(meta) = &self.meta {
            meta.validate()?;
        }
        Ok(())
    }
}

/// Normalized click statistics of a histogram file; counts keep their trial total.
pub fn read_histogram(path: &Path) -> Result<ClickStatistics> {
    read_histogram_file(path)?.to_stats()
}

pub fn read_histogram_file(path: &Path) -> Result<HistogramFile> {
    HistogramFile::read(path)
}
