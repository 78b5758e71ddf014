use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// An index or level exceeds the available range.
    #[error("range error in {op}: {msg}")]
    Range { op: &'static str, msg: String },

    /// A boundary grid is too coarse to resolve the integrand.
    #[error("grid too coarse for {op}: need at least {required} points, got {actual}")]
    Resolution {
        op: &'static str,
        required: usize,
        actual: usize,
    },

    /// An iterative or series computation failed to produce a finite answer.
    #[error("numeric failure in {op}: {msg}")]
    Numeric { op: &'static str, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}

pub(crate) fn numeric(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Numeric {
        op,
        msg: msg.into(),
    }
}
