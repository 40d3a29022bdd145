use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit amplitudes are not normalized: |alpha|^2 + |beta|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("tensor structure mismatch: {0}")]
    Structure(String),

    #[error("partition does not cover mode {0}")]
    Partition(String),

    #[error("operation `{op}` is not supported on {kind}")]
    UnsupportedKind { op: &'static str, kind: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot estimate phi: both output powers are zero")]
    UndefinedEstimate,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
