use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bathymetry profile: {0}")]
    InvalidProfile(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-positive water depth: {0}")]
    NonPositiveDepth(String),

    #[error("solution blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("argument outside domain of definition: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data in {path}: {detail}")]
    Parse { path: PathBuf, detail: String },
}

impl Error {
    /// Short machine-readable kind tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidProfile(_) => "invalid_profile",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::NonPositiveDepth(_) => "non_positive_depth",
            Error::BlowUp { .. } => "blow_up",
            Error::RootFinding(_) => "root_finding",
            Error::Domain(_) => "domain",
            Error::Consistency(_) => "consistency",
            Error::Config(_) => "config",
            Error::Unsupported(_) => "unsupported",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
