use thiserror::Error;

/// Errors raised by the geometry, field and optimization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed curve: {0}")]
    MalformedCurve(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vertical tangent at interior sample x = {x}")]
    VerticalTangent { x: f64 },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedCurve(_) => "malformed_curve",
            Error::Domain(_) => "domain",
            Error::VerticalTangent { .. } => "vertical_tangent",
            Error::DegenerateDomain(_) => "degenerate_domain",
            Error::SolverFailure { .. } => "solver_failure",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
