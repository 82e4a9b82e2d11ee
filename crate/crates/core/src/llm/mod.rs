//! Candidate generators: a chat-completion HTTP client and an offline mock,
//! both recording token usage for cost accounting.

mod extract;
mod mock;
mod remote;
mod usage;

use serde::{Deserialize, Serialize};

pub use extract::extract_code;
pub use mock::{MockGenerator, MockMode, MutationRule};
pub use remote::{RemoteConfig, RemoteGenerator, API_KEY_ENV};
pub use usage::{cost_report, Rates, UsageLedger};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRequest {
    pub prompt: String,
    pub samples: usize,
    pub model: String,
    pub max_output_tokens: u32,
    pub sampling_temperature: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GatewayError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("rate limited by the completion endpoint")]
    RateLimited,
    #[error("completion endpoint returned HTTP {status}: {body}")]
    Api { status: u16, body: String },
    #[error("completion was empty")]
    EmptyCompletion,
    #[error("could not decode completion response: {0}")]
    Decode(String),
    #[error("environment variable {0} is not set")]
    MissingCredentials(&'static str),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Anything that turns a prompt into candidate planner sources.
pub trait Generator: Send + Sync {
    fn draw_samples(&self, request: &GeneratorRequest) -> Result<Vec<String>, GatewayError>;

    /// Totals across every call made so far.
    fn usage(&self) -> UsageLedger;
}
