use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exponent outside the range an operation supports.
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    /// An argument outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested (θ, r) pair that no implemented regime covers.
    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    /// An iterative solver stopped without meeting its tolerance.
    #[error("{what} did not converge (residual {residual:e} after {iterations} iterations)")]
    NonConvergence { what: &'static str, residual: f64, iterations: usize },

    /// A supporting plane failed one of its validity conditions.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// The oracle could not produce step functions with the requested moments.
    #[error("infeasible moments: {0}")]
    Infeasible(String),

    /// A malformed step function.
    #[error("invalid step function: {0}")]
    StepFunction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
