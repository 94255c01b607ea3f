use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("no feasible data rate: {0}")]
    EmptyFeasibleSet(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Core(#[from] linkform_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::EmptyFeasibleSet(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Core(_) | CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
