use thiserror::Error;

pub type Result<T> = std::result::Result<T, QgfError>;

#[derive(Debug, Error)]
pub enum QgfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The filtered denominator fell below the numerical floor; the filter
    /// has annihilated the state.
    #[error("degenerate denominator |{magnitude:e}| below floor {floor:e}")]
    DegenerateDenominator { magnitude: f64, floor: f64 },

    #[error("every scanned grid point produced a degenerate denominator")]
    AllDegenerate,

    #[error("filtered state annihilated: success probability {0:e}")]
    UnderflowAnnihilated(f64),

    #[error("table mismatch: {0}")]
    TableMismatch(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QgfError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QgfError::InvalidParameter(msg.into())
    }
}
