//! Error type shared across the crate, with stable machine-readable codes.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
///
/// Each variant maps to a stable kebab-case code via [`Error::code`], which
/// the CLI prints as `error: <code>: <message>`. Non-convergence of an
/// optimizer or a quadrature is *not* an error — those are reported through
/// `converged` flags on the result types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside a function's mathematical domain.
    #[error("{0}")]
    Domain(String),

    /// A sample was smaller than the operation's minimum size.
    #[error("sample has {n} values, need at least {min}")]
    SampleTooSmall { n: usize, min: usize },

    /// A variance-based estimator received a (near-)constant sample.
    #[error("sample variance is zero")]
    DegenerateVariance,

    /// A binary raster was given without its JSON sidecar.
    #[error("no sidecar found at {}", .0.display())]
    MissingSidecar(PathBuf),

    /// Declared raster dimensions disagree with the data actually present.
    #[error("{0}")]
    DimensionMismatch(String),

    /// A raster contained a negative (or non-finite) pixel.
    #[error("{0}")]
    NegativeValue(String),

    /// A region specification does not fit inside the raster.
    #[error("{0}")]
    InvalidRegion(String),

    /// Malformed textual input (CSV, sidecar JSON, CLI value syntax).
    #[error("{0}")]
    Parse(String),

    /// An iterative numeric routine exhausted its iteration budget.
    #[error("{0}")]
    Numeric(&'static str),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for this error, used on the CLI surface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain-error",
            Error::SampleTooSmall { .. } => "sample-too-small",
            Error::DegenerateVariance => "degenerate-variance",
            Error::MissingSidecar(_) => "missing-sidecar",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NegativeValue(_) => "negative-value",
            Error::InvalidRegion(_) => "invalid-region",
            Error::Parse(_) => "parse-error",
            Error::Numeric(_) => "numeric-error",
            Error::Io(_) => "io-error",
        }
    }
}

/// Shorthand for building a [`Error::Domain`] from format arguments.
macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(format!($($arg)*))
    };
}
pub(crate) use domain;
