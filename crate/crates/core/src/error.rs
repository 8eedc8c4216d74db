use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid input (non-permutation, malformed tree, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Text input could not be parsed; `position` is a byte offset.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// Floating-point resolution exhausted (e.g. a leaf interval underflowed
    /// to zero width, so the next leaf choice would be ill-defined).
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// The operation is exact but its cost is exponential in `n` and the
    /// configured cap was exceeded.
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    /// Exhaustive enumeration requested beyond the hard cap.
    #[error("enumeration cap exceeded: n = {n} > {cap}")]
    EnumerationCap { n: usize, cap: usize },

    /// A simulation exceeded its iteration safety cap.
    #[error("iteration cap of {0} exceeded")]
    IterationCap(u64),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// A statistical test was given an empty or incompatible support.
    #[error("empty support")]
    EmptySupport,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
