use thiserror::Error;

/// Every failure the simulator can report.
///
/// Variants carry enough context (field name, step index, measured value) to
/// be printed directly as the diagnostic of an aborted run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("wave packet with sigma {sigma} nm is not resolvable on spacing {spacing} nm (need sigma >= 2 h)")]
    UnresolvablePacket { sigma: f64, spacing: f64 },

    #[error("trap not representable on grid: {0}")]
    TrapResolution(String),

    #[error("initial state does not factorize in centre-of-mass coordinates: {0}")]
    Factorization(String),

    #[error("point ({x}, {y}) nm lies outside the source grid")]
    OutsideGrid { x: f64, y: f64 },

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("reduced density spectrum is not pairwise degenerate: pair {index} differs by {mismatch:e}")]
    Pairing { index: usize, mismatch: f64 },

    #[error("canonical form does not reconstruct W: residual {0:e}")]
    Reconstruction(f64),

    #[error("norm drift {drift:e} at step {step} exceeds the contract")]
    NormDrift { step: u64, drift: f64 },

    #[error("boundary-adjacent probability {probability:e} at step {step}: domain too small")]
    BoundaryLeak { step: u64, probability: f64 },

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("spin configuration `{0}` is not available in 2D")]
    UnsupportedSpin(String),

    #[error("grid too large: {0}")]
    GridTooLarge(String),

    #[error("binary format: {0}")]
    Format(String),

    #[error("unknown figure `{0}`")]
    UnknownFigure(String),

    #[error("{context}: step {step}: {source}")]
    AtStep {
        context: &'static str,
        step: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, context: &'static str, step: u64) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                context,
                step,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
