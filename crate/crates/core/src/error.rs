use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix had the wrong shape for the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The combinatorial Pfaffian is capped at dim 8.
    #[error("size limit: combinatorial Pfaffian supports dim <= {max}, got {dim}; use pfaffian_normal_form")]
    SizeLimit { dim: usize, max: usize },

    /// A matrix claimed to be skew-symmetric is not.
    #[error("matrix is not skew-symmetric: entries ({i},{j}) = {upper} and ({j},{i}) = {lower} do not cancel")]
    NotSkew {
        i: usize,
        j: usize,
        upper: f64,
        lower: f64,
    },

    /// An input object failed structural validation (non-orthonormal frame,
    /// dependent basis, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A plane lies outside the Hom(P, P-perp) chart domain.
    #[error("chart domain error: {0}")]
    ChartDomain(String),

    /// A point or parameter is outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Twisting data does not define a valid germ.
    #[error("invalid germ: {0}")]
    InvalidGerm(String),

    /// The requested construction does not exist.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
