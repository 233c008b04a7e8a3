use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// Variants carry enough context to tell which quantity failed; pipelines
/// that chain several steps wrap the inner error in [`Error::Stage`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the operation (e.g. an imaginary
    /// shift outside the analytic strip).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A retained Fourier mode has a divisor `|e^{2πikω} − 1|` below the floor.
    #[error("small divisor at mode k={k}: |e^(2πikω)-1| = {divisor:e} < floor {floor:e} (nearest convergent denominator q={nearest_q})")]
    SmallDivisor {
        k: i64,
        divisor: f64,
        floor: f64,
        nearest_q: u64,
    },

    /// A grid-based nonlinear operation did not resolve within the maximum grid.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Not enough continued-fraction data (finite expansion exhausted).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A configured size or precision budget would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An iterative method failed to reach its residual target.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),

    /// An error raised inside a named stage of a multi-step pipeline.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with any stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the root cause is a size/precision budget.
    pub fn is_resource(&self) -> bool {
        matches!(self.root(), Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
