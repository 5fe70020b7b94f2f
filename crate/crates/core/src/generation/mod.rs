//! Batched sentence-pair generation against a chat-completions endpoint.

mod endpoint;
mod job;
mod ordering;
mod prompt;

pub use endpoint::{ChatEndpoint, ChatMessage, EndpointFailure, HttpChatEndpoint};
pub use job::{
    checkpoint_path, parse_batch, run_job, run_job_http, BatchLog, GenerationJob, GenerationLog,
    GenerationOutcome, RejectedRow, RunOptions, DEFAULT_API_KEY_ENV,
};
pub use ordering::{validate_ordering, FlaggedRecord, OrderingReport};
pub use prompt::{build_prompt, continuation_prompt, format_pair, PROMPT_TEMPLATE};

use thiserror::Error;

use crate::io::DataError;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("API key environment variable `{0}` is not set")]
    AuthMissing(String),
    #[error("batch {batch} failed after {attempts} attempt(s): {message}")]
    EndpointError { batch: usize, attempts: usize, message: String },
    #[error("unknown linguistic property `{0}`")]
    UnknownProperty(String),
    #[error("invalid generation job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    Data(#[from] DataError),
}
