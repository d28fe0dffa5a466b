use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the numeric core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A row had a different length than the declared dimension.
    RaggedRow { row: usize, expected: usize, found: usize },
    /// A NaN or infinite value at `(row, col)`.
    NonFinite { row: usize, col: usize },
    /// Dimension must be at least one.
    ZeroDimension,
    /// Two inputs that must agree in size or dimension did not.
    ShapeMismatch {
        what: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Cosine similarity is undefined for a zero vector.
    ZeroNorm { argument: &'static str },
    /// A parameter outside its documented domain.
    InvalidParameter { name: &'static str, reason: String },
    /// Not enough rows for the requested operation.
    TooFewSamples { what: &'static str, needed: usize, found: usize },
    /// A cluster too small to be labeled on its own.
    ClusterTooSmall { cluster: usize, size: usize },
    /// Model decoding failure.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RaggedRow { row, expected, found } => {
                write!(f, "row {row} has {found} values, expected {expected}")
            }
            Error::NonFinite { row, col } => write!(f, "non-finite value at row {row}, column {col}"),
            Error::ZeroDimension => f.write_str("dimension must be at least 1"),
            Error::ShapeMismatch { what, left, right } => write!(
                f,
                "{what}: shape {}x{} does not match {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::ZeroNorm { argument } => {
                write!(f, "cosine similarity undefined: argument `{argument}` has zero norm")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::TooFewSamples { what, needed, found } => {
                write!(f, "{what}: need at least {needed} samples, got {found}")
            }
            Error::ClusterTooSmall { cluster, size } => write!(
                f,
                "cluster {cluster} has only {size} point(s); use a smaller number of clusters"
            ),
            Error::Format(msg) => write!(f, "model format: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
