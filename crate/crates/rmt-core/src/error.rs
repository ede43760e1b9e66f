use thiserror::Error;

/// Errors produced by the kernel-construction pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error(
        "precision exhausted at degree {degree}: squared norm lost all significant bits \
         (increase mantissa_bits)"
    )]
    PrecisionExhausted { degree: usize },

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("matrix near-singular: {what} has condition number {cond:.3e} (limit {limit:.1e})")]
    Singular { what: String, cond: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("negative value under square root: det = {0:.6e} (discretization too coarse)")]
    NegativeDeterminant(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
