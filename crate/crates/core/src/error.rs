use thiserror::Error;

/// Errors raised by the phase-space algebra, scheme formulas and protocols.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A mode index does not exist in the state.
    #[error("mode {mode} out of range for a {n_modes}-mode state")]
    Mode { mode: usize, n_modes: usize },

    /// Dimensions of two operands do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A covariance matrix violates the uncertainty principle.
    #[error("covariance is not physical: smallest eigenvalue of cov + i\u{3a9} is {min_eigenvalue:e}")]
    Inadmissible { min_eigenvalue: f64 },

    /// A numeric precondition of a formula was violated (e.g. non-unity gain).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_closed(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<f64> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, domain })
    }
}

/// Checks `lo < value < hi`, rejecting NaN.
pub(crate) fn check_open(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<f64> {
    if value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, domain })
    }
}
