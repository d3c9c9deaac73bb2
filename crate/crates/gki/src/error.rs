//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while fitting, querying, or shuffling images.
///
/// The type is `Clone` so that per-query failures can be collected inside a
/// confidence band without aborting the batch; I/O errors are therefore
/// stored as their display string.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector or point had the wrong length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two sample points coincide, so the Gram matrix cannot be invertible.
    #[error("duplicate sample points at indices {first} and {second}")]
    DuplicateInputs { first: usize, second: usize },

    /// Cholesky factorization hit a non-positive pivot.
    #[error(
        "matrix is not numerically positive definite (pivot {pivot}); \
         raising the jitter usually fixes this"
    )]
    NotPositiveDefinite { pivot: usize },

    /// The Schur complement of a query collapsed, i.e. the query is
    /// numerically indistinguishable from the span of the samples.
    #[error("query is numerically degenerate against the samples (schur complement {g0:.3e})")]
    DegenerateQuery { g0: f64 },

    /// The requested norm bound is below the interpolant norm, so the
    /// feasible set is empty.
    #[error("norm bound {kappa:.6e} is below the interpolant norm {norm_sq:.6e}")]
    InfeasibleBound { kappa: f64, norm_sq: f64 },

    /// An image/mask operation found nothing to work with.
    #[error("no observed pixels")]
    NoData,

    /// Two images or buffers disagree on shape.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A NetPBM or sidecar file could not be parsed.
    #[error("{path}: parse error at byte {offset}: {message}")]
    Parse {
        path: String,
        offset: usize,
        message: String,
    },

    /// Wrapped I/O error (stringified to keep the enum `Clone`).
    #[error("i/o error: {0}")]
    Io(String),

    /// A batched query failed while the batch was run in strict mode.
    #[error("query {index} failed: {source}")]
    QueryFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn io_errors_convert_and_clone() {
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "missing.pgm");
        let err: Error = io.into();
        let copy = err.clone();
        assert_eq!(err, copy);
        assert!(err.to_string().contains("missing.pgm"));
    }

    #[test]
    fn messages_name_the_offending_indices() {
        let err = Error::DuplicateInputs { first: 3, second: 17 };
        assert!(err.to_string().contains('3') && err.to_string().contains("17"));
        let err = Error::NotPositiveDefinite { pivot: 5 };
        assert!(err.to_string().contains('5'));
        assert!(err.to_string().contains("jitter"));
    }

    #[test]
    fn query_failed_preserves_the_cause() {
        let inner = Error::DegenerateQuery { g0: 1e-15 };
        let err = Error::QueryFailed { index: 9, source: Box::new(inner.clone()) };
        assert!(err.to_string().starts_with("query 9"));
        assert_eq!(*match err { Error::QueryFailed { source, .. } => source, _ => unreachable!() }, inner);
    }
}
