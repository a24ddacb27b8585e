use clickstat_core::certify::{BootstrapCertificate, Certificate, MinimalEigen, Verdict};
use serde::{Deserialize, Serialize};

use super::{check_finite, check_version, invalid, JsonFile, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenRecord {
    /// Exponent pairs `(s_A, s_B)` labelling the vector components.
    pub index_map: Vec<(u32, u32)>,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenRecords {
    #[serde(rename = "A")]
    pub a: EigenRecord,
    #[serde(rename = "B")]
    pub b: EigenRecord,
    #[serde(rename = "AB")]
    pub ab: EigenRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapInfo {
    pub resamples: usize,
    pub seed: u64,
    /// Bootstrap means of `e_A`, `e_B`, `e_AB`.
    pub means: [f64; 3],
}

/// Serialized [`Certificate`]. Uncertainties and significances are `null`
/// where the input carried no trial count or the spread vanished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub format_version: String,
    pub order: (u32, u32),
    pub threshold: f64,
    #[serde(rename = "eA")]
    pub e_a: f64,
    #[serde(rename = "eB")]
    pub e_b: f64,
    #[serde(rename = "eAB")]
    pub e_ab: f64,
    #[serde(rename = "dEA")]
    pub de_a: Option<f64>,
    #[serde(rename = "dEB")]
    pub de_b: Option<f64>,
    #[serde(rename = "dEAB")]
    pub de_ab: Option<f64>,
    #[serde(rename = "sigmaA")]
    pub sigma_a: Option<f64>,
    #[serde(rename = "sigmaB")]
    pub sigma_b: Option<f64>,
    #[serde(rename = "sigmaAB")]
    pub sigma_ab: Option<f64>,
    pub verdict: String,
    pub eigvecs: EigenRecords,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapInfo>,
}

fn record(e: &MinimalEigen) -> EigenRecord {
    EigenRecord {
        index_map: e.index_map.clone(),
        vector: e.vector.clone(),
    }
}

impl CertificateFile {
    pub fn from_certificate(c: &Certificate) -> Result<Self> {
        let file = Self {
            format_version: FORMAT_VERSION.into(),
            order: c.order,
            threshold: c.threshold,
            e_a: c.a.value,
            e_b: c.b.value,
            e_ab: c.ab.value,
            de_a: c.a.uncertainty,
            de_b: c.b.uncertainty,
            de_ab: c.ab.uncertainty,
            sigma_a: c.a.significance,
            sigma_b: c.b.significance,
            sigma_ab: c.ab.significance,
            verdict: c.verdict.as_str().into(),
            eigvecs: EigenRecords {
                a: record(&c.a),
                b: record(&c.b),
                ab: record(&c.ab),
            },
            bootstrap: None,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn from_bootstrap(b: &BootstrapCertificate, seed: u64) -> Result<Self> {
        let mut file = Self::from_certificate(&b.certificate)?;
        file.bootstrap = Some(BootstrapInfo {
            resamples: b.resamples,
            seed,
            means: b.means,
        });
        file.validate()?;
        Ok(file)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::parse(&self.verdict).expect("validated")
    }
}

impl JsonFile for CertificateFile {
    fn validate(&self) -> Result<()> {
        check_version(&self.format_version)?;
        check_finite("threshold", self.threshold)?;
        for (field, x) in [("eA", self.e_a), ("eB", self.e_b), ("eAB", self.e_ab)] {
            check_finite(field, x)?;
        }
        for (field, x) in [
            ("dEA", self.de_a),
            ("dEB", self.de_b),
            ("dEAB", self.de_ab),
            ("sigmaA", self.sigma_a),
            ("sigmaB", self.sigma_b),
            ("sigmaAB", self.sigma_ab),
        ] {
            if let Some(x) = x {
                check_finite(field, x)?;
            }
        }
        if Verdict::parse(&self.verdict).is_none() {
            return Err(invalid("verdict", format_args!("unknown verdict \"{}\"", self.verdict)));
        }
        for (name, r) in [("A", &self.eigvecs.a), ("B", &self.eigvecs.b), ("AB", &self.eigvecs.ab)] {
            if r.index_map.len() != r.vector.len() {
                return Err(invalid(format!("eigvecs.{name}"), "index_map and vector lengths differ"));
            }
            for (i, x) in r.vector.iter().enumerate() {
                check_finite(&format!("eigvecs.{name}.vector[{i}]"), *x)?;
            }
        }
        if let Some(b) = &self.bootstrap {
            for (i, x) in b.means.iter().enumerate() {
                check_finite(&format!("bootstrap.means[{i}]"), *x)?;
            }
        }
        Ok(())
    }
}
