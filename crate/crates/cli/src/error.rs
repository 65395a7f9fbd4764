use nahm_core::NahmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) | Self::Io(_) => 1,
            Self::Numeric(_) => 2,
        }
    }
}

impl From<NahmError> for CliError {
    fn from(e: NahmError) -> Self {
        match e {
            NahmError::IntegrationFailure { .. }
            | NahmError::RankDeficient
            | NahmError::NotInvertible
            | NahmError::OutOfRange { .. }
            | NahmError::NotOnGrid(_) => Self::Numeric(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}
