use std::thread;
use std::time::Duration;

use log::warn;
use reqwest::blocking::Client;

use super::{ChatRequest, LlmBackendConfig, LlmError, RetryPolicy};

pub(super) struct LiveClient {
    http: Client,
    endpoint: String,
    key_env: String,
    retry: RetryPolicy,
}

fn truncate(mut s: String, max: usize) -> String {
    if s.len() > max {
        let mut cut = max;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

impl LiveClient {
    pub(super) fn new(config: &LlmBackendConfig) -> Result<Self, LlmError> {
        let http = Client::builder()
            .timeout(Duration::from_secs(config.retry.timeout_secs))
            .build()
            .map_err(|e| LlmError::InvalidConfig(format!("cannot build HTTP client: {e}")))?;
        Ok(Self {
            http,
            endpoint: config.endpoint.clone().expect("validated"),
            key_env: config.api_key_env.clone().expect("validated"),
            retry: config.retry.clone(),
        })
    }

    /// Posts `req`; retries timeouts, 5xx and 429 with exponential backoff.
    pub(super) fn complete(&self, req: &ChatRequest) -> Result<String, LlmError> {
        let key = std::env::var(&self.key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| LlmError::MissingCredentials(self.key_env.clone()))?;
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let transient = match self.http.post(&self.endpoint).bearer_auth(&key).json(req).send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return parse_response(&resp.text().map_err(|e| {
                            LlmError::MalformedResponse(format!("unreadable body: {e}"))
                        })?);
                    }
                    let code = status.as_u16();
                    let body = truncate(resp.text().unwrap_or_default(), 500);
                    if code != 429 && !status.is_server_error() {
                        return Err(LlmError::Http { status: code, body });
                    }
                    format!("HTTP {code}: {body}")
                }
                Err(e) if e.is_timeout() => format!("timed out: {e}"),
                Err(e) => {
                    return Err(LlmError::Transport {
                        attempts: attempt,
                        message: e.to_string(),
                    })
                }
            };
            if attempt > self.retry.max_retries {
                return Err(LlmError::Transport {
                    attempts: attempt,
                    message: transient,
                });
            }
            let delay = self.retry.backoff_base_ms.saturating_mul(1 << (attempt - 1).min(16));
            warn!("attempt {attempt} failed ({transient}); retrying in {delay} ms");
            thread::sleep(Duration::from_millis(delay));
        }
    }
}

fn parse_response(body: &str) -> Result<String, LlmError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))
}
