use qgf_core::QgfError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] QgfError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                QgfError::InvalidParameter(_) | QgfError::Parse { .. } | QgfError::DimensionMismatch { .. } => 2,
                QgfError::ResourceLimit(_) => 3,
                QgfError::DegenerateDenominator { .. } | QgfError::AllDegenerate | QgfError::UnderflowAnnihilated(_) => 4,
                _ => 1,
            },
            CliError::Io(_) | CliError::Serialize(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}
