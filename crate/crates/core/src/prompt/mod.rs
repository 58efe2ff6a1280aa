//! Ad-copy prompting: build the prompt sentence from an [`AdCopySpec`], run it
//! through an [`LlmBackend`], split the completion into variants and check
//! each against what was asked for.

mod backend;
mod emoticon;
mod generate;
mod spec;
mod validate;

pub use backend::{mock_generate, BackendError, LlmBackend, MockBackend};
pub use emoticon::{count_words, has_emoticon, is_emoticon_char};
pub use generate::{generate_copies, parse_variants, GenerationOptions, FORMAT_REMINDER};
pub use spec::{build_prompt, AdCopy, AdCopySpec, CopyStyle};
pub use validate::{validate_copy, ValidationReport, DEFAULT_WORD_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PromptError {
    #[error("invalid ad copy spec: {0}")]
    InvalidSpec(String),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend rate limit exceeded")]
    RateLimited,
    #[error("could not parse variants from completion")]
    ParseFailure { raw: String },
}

impl From<BackendError> for PromptError {
    fn from(err: BackendError) -> Self {
        match err {
            BackendError::RateLimited => PromptError::RateLimited,
            other => PromptError::BackendUnavailable(other.to_string()),
        }
    }
}
