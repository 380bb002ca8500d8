//! Chat-completion plumbing: requests, backends and response extraction.
//!
//! Three backends share one entry point, [`LlmClient::complete`]:
//! - `live` posts the request to an HTTP endpoint,
//! - `replay` reads a recorded response named by the request hash,
//! - `mock` rewrites the programs embedded in the prompt with a seeded mutator.

mod extract;
mod live;
pub mod mock;
pub mod prompt;

use std::fs;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use extract::{extract_program, ExtractError, Extracted};
pub use prompt::{Prompter, TaskKind, TaskSpec, NOS_PER_PROMPT};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid backend configuration: {0}")]
    InvalidConfig(String),
    #[error("credential variable {0} is not set")]
    MissingCredentials(String),
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("no recorded response for request {hash} (looked for {path})")]
    MissingReplay { hash: String, path: PathBuf },
    #[error("replay I/O on {path}: {source}")]
    ReplayIo {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("wrong number of strategies: expected {expected}, got {found}")]
    NosCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// Body of a chat-completion call. Serializes to the wire format as is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<Message>,
}

impl ChatRequest {
    pub fn new(model: impl Into<String>, temperature: f64, messages: Vec<Message>) -> Result<Self, LlmError> {
        let req = Self {
            model: model.into(),
            temperature,
            messages,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.messages.is_empty() {
            return Err(LlmError::InvalidRequest("at least one message is required".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(LlmError::InvalidRequest(format!(
                "temperature {} must be non-negative",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Hex SHA-256 of the request's JSON encoding; names replay files.
    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("request serializes");
        Sha256::digest(&body).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The last user message, which carries the task.
    pub fn user_text(&self) -> &str {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map_or("", |m| m.content.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Live,
    Replay,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub timeout_secs: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            backoff_base_ms: 1000,
            timeout_secs: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmBackendConfig {
    pub kind: BackendKind,
    pub model: String,
    pub temperature: f64,
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub retry: RetryPolicy,
    /// Replay source; for `live`, responses are also recorded here when set.
    pub replay_dir: Option<PathBuf>,
    pub mock_seed: u64,
    /// Completion calls in flight at once.
    pub concurrency: usize,
}

impl Default for LlmBackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Mock,
            model: "gpt-4-turbo".into(),
            temperature: 1.0,
            endpoint: None,
            api_key_env: None,
            retry: RetryPolicy::default(),
            replay_dir: None,
            mock_seed: 0,
            concurrency: 4,
        }
    }
}

impl LlmBackendConfig {
    pub fn mock(seed: u64) -> Self {
        Self {
            mock_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.concurrency == 0 {
            return Err(LlmError::InvalidConfig("concurrency must be at least 1".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(LlmError::InvalidConfig("temperature must be non-negative".into()));
        }
        match self.kind {
            BackendKind::Live => {
                if self.endpoint.as_deref().is_none_or(str::is_empty) {
                    return Err(LlmError::InvalidConfig("live backend needs an endpoint".into()));
                }
                if self.api_key_env.as_deref().is_none_or(str::is_empty) {
                    return Err(LlmError::InvalidConfig(
                        "live backend needs api_key_env (the variable holding the key)".into(),
                    ));
                }
            }
            BackendKind::Replay => {
                if self.replay_dir.is_none() {
                    return Err(LlmError::InvalidConfig("replay backend needs replay_dir".into()));
                }
            }
            BackendKind::Mock => {}
        }
        Ok(())
    }
}

/// A configured backend, ready to answer requests.
pub struct LlmClient {
    config: LlmBackendConfig,
    live: Option<live::LiveClient>,
}

impl LlmClient {
    pub fn new(config: LlmBackendConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let live = match config.kind {
            BackendKind::Live => Some(live::LiveClient::new(&config)?),
            _ => None,
        };
        Ok(Self { config, live })
    }

    pub fn config(&self) -> &LlmBackendConfig {
        &self.config
    }

    pub fn complete(&self, req: &ChatRequest) -> Result<String, LlmError> {
        req.validate()?;
        match self.config.kind {
            BackendKind::Mock => Ok(mock::respond(req, self.config.mock_seed)),
            BackendKind::Replay => self.replay(req),
            BackendKind::Live => {
                let text = self.live.as_ref().expect("built for live").complete(req)?;
                if let Some(dir) = &self.config.replay_dir {
                    let path = dir.join(req.hash());
                    fs::create_dir_all(dir)
                        .and_then(|_| fs::write(&path, &text))
                        .map_err(|source| LlmError::ReplayIo { path, source })?;
                }
                Ok(text)
            }
        }
    }

    fn replay(&self, req: &ChatRequest) -> Result<String, LlmError> {
        let dir = self.config.replay_dir.as_ref().expect("validated");
        let hash = req.hash();
        let path = dir.join(&hash);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(LlmError::MissingReplay { hash, path }),
            Err(source) => Err(LlmError::ReplayIo { path, source }),
        }
    }
}

/// One-shot completion with a freshly built client.
pub fn complete(req: &ChatRequest, backend: &LlmBackendConfig) -> Result<String, LlmError> {
    LlmClient::new(backend.clone())?.complete(req)
}
