use corec_kernel::{Elem, EvalError};
use corec_stream::StreamError;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofError {
    /// The proof asserts an element the streams do not have.
    #[error("head mismatch at index {index}: expected {expected}, found {found}")]
    HeadMismatch { index: usize, expected: Elem, found: Elem },
    #[error("hypothesis violated at {0}")]
    HypothesisViolated(Elem),
    #[error("{which} is not a solution: differs from its right-hand side at index {index}")]
    NotASolution { which: String, index: usize },
    #[error("no congruence rule for {0}")]
    NoCongruence(String),
    #[error("hypothesis index {0} out of range")]
    BadIndex(usize),
    #[error("hypothesis {hyp} does not designate the goal at index {index}")]
    NotAHypothesis { hyp: usize, index: usize },
    #[error("middle stream disagrees with the ends at index {index}")]
    MiddleMismatch { index: usize },
    #[error(transparent)]
    Stream(#[from] StreamError),
}

impl From<EvalError> for ProofError {
    fn from(e: EvalError) -> Self {
        ProofError::Stream(StreamError::Eval(e))
    }
}
