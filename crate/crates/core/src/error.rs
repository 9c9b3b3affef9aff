use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the reconstruction pipeline.
///
/// Variants mirror the failure classes of the individual stages so the CLI
/// can map them onto stable exit codes (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("order {requested} exceeds the configured maximum {max}")]
    Order { requested: usize, max: usize },

    #[error("insufficient moment order: table has K={available}, need at least {required}")]
    InsufficientOrder { available: usize, required: usize },

    #[error("unsupported for this density: {0}")]
    Capability(String),

    #[error("offset grid does not cover the support: {0}")]
    Coverage(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("orders m={m}, n={n} exceed the stability cap {cap}")]
    Stability { m: usize, n: usize, cap: usize },

    #[error("frequency {s} is beyond the Nyquist limit {nyquist}")]
    Band { s: f64, nyquist: f64 },

    #[error("data quality: {0}")]
    DataQuality(String),

    #[error("mollifier transform is not positive at s={s} (value {value:e})")]
    OmegaMembership { s: f64, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Format { .. } | Error::Misuse(_) => 2,
            Error::Coverage(_) => 3,
            Error::Singular(_) => 4,
            Error::InsufficientOrder { .. } => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
