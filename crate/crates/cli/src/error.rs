use idinfo_core::bayes::BayesError;
use idinfo_core::identify::IdError;
use idinfo_core::info::InfoError;
use idinfo_core::process::{ProcessError, SpecError};
use idinfo_core::scdist::ScError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The config is malformed or asks for something inconsistent.
    #[error("invalid config at `{path}`: {message}")]
    Invalid { path: String, message: String },
    /// The computation is well defined but would not finish or exceeds a
    /// resource limit.
    #[error("computation refused: {0}")]
    Refused(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn invalid(path: impl Into<String>, message: impl ToString) -> Self {
        CliError::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Refused(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::invalid(e.path, e.message)
    }
}

impl From<BayesError> for CliError {
    fn from(e: BayesError) -> Self {
        match e {
            BayesError::HorizonTooLarge { .. } | BayesError::NonHalting | BayesError::Terminal => {
                CliError::Refused(e.to_string())
            }
            BayesError::Config { field, message } => {
                CliError::invalid(format!("params.{field}"), message)
            }
            BayesError::PriorLength(..) => CliError::invalid("params.prior", e),
            BayesError::AlphabetMismatch { .. } | BayesError::MemoryMismatch { .. } => {
                CliError::invalid("params.hypotheses", e)
            }
            BayesError::Process(e) => e.into(),
            BayesError::Info(e) => e.into(),
            other => CliError::invalid("params", other),
        }
    }
}

impl From<ScError> for CliError {
    fn from(e: ScError) -> Self {
        match e {
            ScError::TooLong(_) | ScError::NeverHalts => CliError::Refused(e.to_string()),
            other => CliError::invalid("params", other),
        }
    }
}

impl From<InfoError> for CliError {
    fn from(e: InfoError) -> Self {
        match e {
            InfoError::HorizonTooLarge { .. } | InfoError::NoConvergence(_) => {
                CliError::Refused(e.to_string())
            }
            other => CliError::invalid("params", other),
        }
    }
}

impl From<ProcessError> for CliError {
    fn from(e: ProcessError) -> Self {
        match e {
            ProcessError::Info(e) => e.into(),
            other => CliError::invalid("params", other),
        }
    }
}

impl From<IdError> for CliError {
    fn from(e: IdError) -> Self {
        CliError::invalid("params", e)
    }
}
