use thiserror::Error;

/// Failure modes shared by every module.
///
/// The CLI maps `Usage`/`Domain` to exit code 2, `Numeric` to 3 and
/// `Consistency` to 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric error: {what} (residual {residual:e}, {iterations} iterations)")]
    Numeric {
        what: String,
        residual: f64,
        iterations: usize,
    },
    #[error("consistency error: {what} (discrepancy {discrepancy:e})")]
    Consistency { what: String, discrepancy: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn numeric(what: impl Into<String>, residual: f64, iterations: usize) -> Self {
        Error::Numeric {
            what: what.into(),
            residual,
            iterations,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
