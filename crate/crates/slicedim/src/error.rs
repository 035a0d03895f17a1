use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("p = {p} and q = {q} are not co-prime")]
    NotCoprime { p: u64, q: u64 },

    #[error("slope {p}/{q} out of range: need 1 <= p <= q")]
    OutOfRange { p: u64, q: u64 },

    #[error("word lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what}: n = {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("weight matrix is not irreducible")]
    NotIrreducible,

    #[error("tail weight vanished; log ratio undefined")]
    DegenerateDenominator,

    #[error("eigenvalue 3 is not simple or has no non-negative eigenvector")]
    DegenerateEigenvector,

    #[error("iteration cap reached before the requested tolerance")]
    NotConverged,

    #[error("matrix maps the point to zero")]
    ZeroImage,

    #[error("Hilbert distance undefined for incompatible zero patterns")]
    HilbertUndefined,

    #[error("empty sample")]
    EmptySample,

    #[error("empty word")]
    EmptyWord,

    #[error("report invariant violated: {0}")]
    ReportInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
