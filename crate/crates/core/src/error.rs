use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A matrix failed a structural check (unitarity, Hermiticity, positivity, ...).
    #[error("invalid {kind}: {reason}")]
    InvalidOperator { kind: &'static str, reason: String },

    /// A configuration value failed validation. `field` is a dotted path into the config tree.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    /// Threshold data violated its schema or monotonicity.
    #[error("{source_name}: row {row}: {message}")]
    Schema {
        source_name: String,
        row: usize,
        message: String,
    },

    /// A blinding power was requested outside the tabulated range of a threshold curve.
    #[error("blinding power {power_mw} mW is outside the tabulated range [{min_mw}, {max_mw}] mW")]
    OutOfDomain {
        power_mw: f64,
        min_mw: f64,
        max_mw: f64,
    },

    /// Threshold curves do not reach the split blinding power for these total powers.
    #[error("threshold curves do not cover blinding powers {powers_mw:?} mW")]
    Coverage { powers_mw: Vec<f64> },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::InvalidOperator { .. } => "invalid_operator",
            Error::Config { .. } => "config",
            Error::Schema { .. } => "schema",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Coverage { .. } => "coverage",
            Error::UnknownParameter(_) => "unknown_parameter",
            Error::WeightSum(_) => "weight_sum",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Toml(_) => "toml",
        }
    }
}
