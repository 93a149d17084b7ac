use fusenews_core::Error as CoreError;
use thiserror::Error;

use crate::dataset::DatasetError;
use crate::embeddings::EmbeddingFileError;
use crate::lexicon::LexiconError;
use crate::weights::WeightsError;

/// Process exit status of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    Failure = 1,
    /// Dataset, embedding, lexicon or config input could not be parsed.
    InputMalformed = 2,
    /// The data cannot support the requested run (one class, too few rows).
    Degenerate = 3,
    /// Weights file unreadable or inconsistent with the inputs.
    WeightsMismatch = 4,
    /// The requested explanation is not available for this model.
    UnsupportedExplain = 5,
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(ExitCode::InputMalformed, message)
    }

    pub fn weights(message: impl Into<String>) -> Self {
        Self::new(ExitCode::WeightsMismatch, message)
    }

    /// Core errors raised while applying a loaded model to inputs count as
    /// weights mismatches when they concern shapes.
    pub fn from_inference(e: CoreError) -> Self {
        match e {
            CoreError::Length { .. } | CoreError::Shape { .. } | CoreError::Config(_) => Self::weights(e.to_string()),
            other => other.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::SingleClass
            | CoreError::ClassTooSmall { .. }
            | CoreError::TooFewSamples { .. }
            | CoreError::Empty(_) => ExitCode::Degenerate,
            CoreError::NoAttention => ExitCode::UnsupportedExplain,
            CoreError::MissingEmbedding(_) | CoreError::Config(_) | CoreError::InvalidArgument(_) => {
                ExitCode::InputMalformed
            }
            CoreError::Length { .. } | CoreError::Shape { .. } => ExitCode::WeightsMismatch,
            _ => ExitCode::Failure,
        };
        Self::new(code, e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<EmbeddingFileError> for CliError {
    fn from(e: EmbeddingFileError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<WeightsError> for CliError {
    fn from(e: WeightsError) -> Self {
        Self::weights(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(ExitCode::Failure, e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::new(ExitCode::Failure, e.to_string())
    }
}
