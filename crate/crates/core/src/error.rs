use thiserror::Error;

use crate::quadrature::QuadResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension {n} is not supported by {context}")]
    UnsupportedDimension { n: usize, context: &'static str },

    #[error("quadrature did not converge ({reason}); best estimate {} +/- {}", best.value, best.error_estimate)]
    Convergence { reason: String, best: QuadResult },

    #[error("integrand is not finite at {location}")]
    NonFinite { location: String },

    #[error("gauge mismatch: expected {expected}, found {found}")]
    GaugeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("no gauge transform from {from} to {to}")]
    GaugePath {
        from: &'static str,
        to: &'static str,
    },

    #[error("zeta gauge is singular at the origin for n = {n}; the field needs a positive inner cut")]
    SingularGauge { n: usize },

    #[error("field is not admissible: {0}")]
    Admissibility(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
