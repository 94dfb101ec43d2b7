use bellharness::fourier::FourierError;
use bellharness::harness::HarnessError;
use bellharness::stats::StatsError;
use bellharness::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("timeout: {0}")]
    Timeout(String),

    #[error("{0}")]
    Failed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Protocol(_) => 3,
            CliError::Timeout(_) => 4,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(err: HarnessError) -> Self {
        match err {
            HarnessError::InvalidConfig(_) | HarnessError::Model(_) => CliError::Usage(err.to_string()),
            HarnessError::Timeout { .. } => CliError::Timeout(err.to_string()),
            HarnessError::Remote { ref code, .. } if code == "timeout" => CliError::Timeout(err.to_string()),
            HarnessError::Protocol(_) | HarnessError::Remote { .. } => CliError::Protocol(err.to_string()),
            HarnessError::Io(e) => CliError::Io(e),
            HarnessError::Json(_) | HarnessError::Log(_) => CliError::Failed(err.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<FourierError> for CliError {
    fn from(err: FourierError) -> Self {
        match err {
            FourierError::MemoryStrategy(_) | FourierError::AmplitudeOutOfRange(_) | FourierError::Model(_) => {
                CliError::Usage(err.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(err: StatsError) -> Self {
        match err {
            StatsError::InvalidProbability(_) | StatsError::InvalidThreshold { .. } | StatsError::InvalidTable(_) => {
                CliError::Usage(err.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Failed(err.to_string())
    }
}
