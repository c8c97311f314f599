use thiserror::Error;

/// Error taxonomy shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Operands carry different coefficient variants (integer vs rational vs
    /// complex). Only reachable through dynamically typed frontends; the Rust
    /// API is statically typed.
    #[error("coefficient variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }

    /// Process exit status used by the command line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::VariantMismatch(_) => 1,
            Error::NumericalFailure(_) => 2,
            Error::ResourceLimit(_) => 3,
        }
    }

    /// Short machine-readable tag for the diagnostic stream.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::VariantMismatch(_) => "variant-mismatch",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::ResourceLimit(_) => "resource-limit",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
