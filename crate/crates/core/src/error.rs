use std::path::PathBuf;

use crate::experts::ExpertId;
use crate::model::QuestionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("question {question} taught with conflicting answers")]
    ConflictingAnswer { question: QuestionId },

    #[error("question {question} is outside the declared universe of {universe} questions")]
    OutsideUniverse { question: QuestionId, universe: usize },

    #[error("unknown expert {0}")]
    UnknownExpert(ExpertId),

    #[error("value of question {question} is undefined for expert {expert}")]
    ValueUndefined {
        expert: ExpertId,
        question: QuestionId,
    },

    #[error("value function of expert {expert} is not injective: value {value} repeats")]
    NonInjective { expert: ExpertId, value: u64 },

    #[error("value 0 is reserved as the under-full threshold sentinel (expert {expert})")]
    ZeroValue { expert: ExpertId },

    #[error("step cost must be 0 or 1, got {0}")]
    InvalidCost(u8),

    #[error("expert cost vector has {got} entries, expected {expected}")]
    CostArity { got: usize, expected: usize },

    #[error("step {step}: {learner} holds {held} {what}, budget is {budget}")]
    BudgetViolation {
        step: usize,
        learner: String,
        what: &'static str,
        held: usize,
        budget: usize,
    },

    #[error("step {step}: invariant violated: {message}")]
    Invariant { step: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    /// True for errors caused by bad input rather than by a failed bound or
    /// invariant during a game.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Config(_)
                | Error::ConflictingAnswer { .. }
                | Error::OutsideUniverse { .. }
                | Error::UnknownExpert(_)
                | Error::ValueUndefined { .. }
                | Error::NonInjective { .. }
                | Error::ZeroValue { .. }
                | Error::Io { .. }
        )
    }
}
