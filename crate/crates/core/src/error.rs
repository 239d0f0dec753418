use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failed to reach tolerance {tolerance:e} (estimated error {estimate:e}, {panels} panels)")]
    QuadratureFailure {
        tolerance: f64,
        estimate: f64,
        panels: usize,
    },

    #[error("outside the domain of {function}: {reason}")]
    DomainError {
        function: &'static str,
        reason: String,
    },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("density matrix is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    PositivityError { min_eigenvalue: f64 },

    #[error("optimizer stalled: none of {starts} starts converged")]
    OptimizerStall { starts: usize },

    #[error("tail window holds {samples} samples, need at least {required}")]
    InsufficientWindow { samples: usize, required: usize },

    #[error("eigensolver did not converge: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
