use thiserror::Error;

/// Errors raised by the verification toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A non-finite or otherwise invalid numeric operand.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    /// Square matrices larger than the cofactor limit, non-square networks, etc.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown activation `{0}`")]
    UnknownActivation(String),

    /// A model document that does not follow the JSON schema.
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found,
            context,
        })
    }
}
