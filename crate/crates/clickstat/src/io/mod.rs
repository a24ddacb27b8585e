//! On-disk formats: click histograms, sweeps, certificates and reports as
//! JSON, theory and measurement curves as CSV.
//!
//! Writers are deterministic. JSON objects list keys in sorted order, floats
//! are printed as `{:.16e}` (17 significant digits, enough to round-trip any
//! `f64`) and a file read back and rewritten reproduces its bytes. NaN and
//! infinities are refused with the offending field named.

mod certificate;
mod curve;
mod histogram;
mod json;
mod report;
mod sweep;

use std::fmt::Display;
use std::path::{Path, PathBuf};

pub use certificate::{BootstrapInfo, CertificateFile, EigenRecord, EigenRecords};
pub use curve::{render_curve, write_curve, CurveRow, CURVE_HEADER, CURVE_HEADER_WITH_ERRORS};
pub use histogram::{read_histogram, read_histogram_file, HistogramFile, HistogramMeta};
pub use json::{format_float, to_canonical_json};
pub use report::{ComparisonFile, FitFile, ModelEntry, ModeEntry, OracleFile, ResidualEntry};
pub use sweep::{read_sweep, SweepEntry, SweepFile};

/// The only `format_version` understood by this release.
pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("invalid field `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error(transparent)]
    Core(#[from] clickstat_core::Error),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

pub(crate) fn invalid(field: impl Into<String>, message: impl Display) -> IoError {
    IoError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

pub(crate) fn check_finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format_args!("{x} is not a finite number")))
    }
}

pub(crate) fn check_version(found: &str) -> Result<()> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(invalid(
            "format_version",
            format_args!("expected \"{FORMAT_VERSION}\", found \"{found}\""),
        ))
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` to `path`, surfacing failures with the path attached.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// JSON-typed files with validation on both read and write.
pub trait JsonFile: serde::Serialize + serde::de::DeserializeOwned {
    /// Rejects anything the writer would not produce.
    fn validate(&self) -> Result<()>;

    fn parse(text: &str) -> Result<Self> {
        Self::parse_from(Path::new("<input>"), text)
    }

    fn parse_from(path: &Path, text: &str) -> Result<Self> {
        let value: Self = parse_json(path, text)?;
        value.validate()?;
        Ok(value)
    }

    fn render(&self) -> Result<String> {
        self.validate()?;
        to_canonical_json(self)
    }

    fn read(path: &Path) -> Result<Self> {
        Self::parse_from(path, &read_text(path)?)
    }

    fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render()?)
    }
}
