use corec_chunk::ChunkError;
use corec_kernel::EvalError;
use corec_proof::ProofError;
use corec_stream::StreamError;
use corec_universe::UError;
use thiserror::Error;

use crate::parse::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("refuted at {index}: {reason}")]
    Refuted { index: usize, reason: String },
    #[error("{0}")]
    Eval(EvalError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } | CliError::UnknownName(_) => 2,
            CliError::Eval(EvalError::FuelExhausted { .. }) => 3,
            CliError::Rejected(_) | CliError::Refuted { .. } | CliError::Eval(_) => 1,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Eval(e)
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::Eval(e) => CliError::Eval(e),
            other => CliError::Rejected(other.to_string()),
        }
    }
}

impl From<ChunkError> for CliError {
    fn from(e: ChunkError) -> Self {
        match e {
            ChunkError::Eval(e) => CliError::Eval(e),
            other => CliError::Rejected(other.to_string()),
        }
    }
}

impl From<UError> for CliError {
    fn from(e: UError) -> Self {
        match e {
            UError::Eval(e) => CliError::Eval(e),
            other => CliError::Rejected(other.to_string()),
        }
    }
}

impl From<ProofError> for CliError {
    fn from(e: ProofError) -> Self {
        let reason = e.to_string();
        match e {
            ProofError::HeadMismatch { index, .. }
            | ProofError::NotASolution { index, .. }
            | ProofError::NotAHypothesis { index, .. }
            | ProofError::MiddleMismatch { index } => CliError::Refuted { index, reason },
            ProofError::Stream(e) => e.into(),
            ProofError::HypothesisViolated(_) | ProofError::NoCongruence(_) | ProofError::BadIndex(_) => CliError::Rejected(reason),
        }
    }
}
