use thiserror::Error;

/// Errors produced by grid construction, transforms, and report evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is malformed (out of range, wrong length, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Input data violates a representation invariant (non-finite samples, shape mismatch).
    #[error("invalid data: {0}")]
    Data(String),

    /// The requested operation is undefined for this input (zero norm, asymmetric
    /// grid for a reflection, inconsistent optical geometry).
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A grid or parameter file does not match the documented schema.
    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
