use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument out of domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: result overflows f64 ({detail})")]
    Overflow {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: series failed to converge after {iterations} terms")]
    NoConvergence {
        function: &'static str,
        iterations: usize,
    },

    #[error("quadrature order {order} outside [{min}, {max}]")]
    OrderOutOfRange { order: usize, min: usize, max: usize },

    #[error("invalid configuration: {field}: {rule}")]
    InvalidConfig { field: String, rule: String },

    #[error("secrecy outage probability {value:e} underflows; lower the element count or the transmit powers")]
    SopUnderflow { value: f64 },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
