//! Chat-completion HTTP backend and backend configuration.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::backend::{AgentBackend, BackendError, CompletionRequest, RecordedBackend, ScriptedBackend};

pub const DEFAULT_TEMPERATURE: f64 = 0.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Scripted,
    Recorded,
    Remote,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Chat-completions URL (remote only).
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    /// Name of the environment variable holding the API key.
    #[serde(default)]
    pub credential_env: Option<String>,
    /// JSON array of completions (scripted only).
    #[serde(default)]
    pub script: Option<PathBuf>,
    /// Saved exchanges (recorded only).
    #[serde(default)]
    pub recording: Option<PathBuf>,
}

fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}

fn default_timeout_secs() -> f64 {
    60.0
}

fn default_max_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    500
}

impl BackendConfig {
    pub fn remote(endpoint: impl Into<String>, model_name: impl Into<String>, credential_env: impl Into<String>) -> Self {
        Self {
            kind: BackendKind::Remote,
            endpoint: Some(endpoint.into()),
            model_name: model_name.into(),
            temperature: DEFAULT_TEMPERATURE,
            timeout_secs: default_timeout_secs(),
            max_retries: default_max_retries(),
            backoff_ms: default_backoff_ms(),
            credential_env: Some(credential_env.into()),
            script: None,
            recording: None,
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        let bad = |msg: &str| Err(BackendError::Config(msg.to_owned()));
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return bad("temperature must be a non-negative number");
        }
        if !self.timeout_secs.is_finite() || self.timeout_secs <= 0.0 {
            return bad("timeout_secs must be positive");
        }
        match self.kind {
            BackendKind::Remote => {
                if self.endpoint.as_deref().is_none_or(str::is_empty) {
                    return bad("remote backend needs an endpoint");
                }
                if self.credential_env.as_deref().is_none_or(str::is_empty) {
                    return bad("remote backend needs credential_env (an environment variable name)");
                }
            }
            BackendKind::Scripted if self.script.is_none() => {
                return bad("scripted backend needs a script file");
            }
            BackendKind::Recorded if self.recording.is_none() => {
                return bad("recorded backend needs a recording file");
            }
            _ => {}
        }
        Ok(())
    }

    /// Instantiates the backend. Relative file paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Box<dyn AgentBackend>, BackendError> {
        self.validate()?;
        let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        Ok(match self.kind {
            BackendKind::Scripted => Box::new(ScriptedBackend::from_file(&resolve(
                self.script.as_ref().expect("validated"),
            ))?),
            BackendKind::Recorded => Box::new(RecordedBackend::from_file(&resolve(
                self.recording.as_ref().expect("validated"),
            ))?),
            BackendKind::Remote => Box::new(RemoteBackend::new(self.clone())?),
        })
    }
}

/// Talks to an OpenAI-style `chat/completions` endpoint.
pub struct RemoteBackend {
    config: BackendConfig,
    client: reqwest::blocking::Client,
}

impl RemoteBackend {
    pub fn new(config: BackendConfig) -> Result<Self, BackendError> {
        config.validate()?;
        if config.kind != BackendKind::Remote {
            return Err(BackendError::Config("not a remote backend config".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(Self { config, client })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    /// The JSON body sent for `request`.
    pub fn request_body(&self, request: &CompletionRequest) -> serde_json::Value {
        let user = if request.context.is_empty() {
            request.instruction.clone()
        } else {
            format!("{}\n\n{}", request.context, request.instruction)
        };
        json!({
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [
                { "role": "system", "content": request.system },
                { "role": "user", "content": user },
            ],
        })
    }

    fn attempt(&self, body: &serde_json::Value, key: &str) -> Result<String, BackendError> {
        let endpoint = self.config.endpoint.as_deref().expect("validated");
        let response = self
            .client
            .post(endpoint)
            .bearer_auth(key)
            .json(body)
            .send()
            .map_err(classify)?;
        let status = response.status();
        let text = response.text().map_err(classify)?;
        if !status.is_success() {
            return Err(BackendError::Http {
                status: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| BackendError::Response(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| BackendError::Response("no choices[0].message.content".into()))
    }
}

fn classify(e: reqwest::Error) -> BackendError {
    if e.is_timeout() {
        BackendError::Timeout
    } else {
        BackendError::Transport(e.to_string())
    }
}

impl AgentBackend for RemoteBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let var = self.config.credential_env.as_deref().expect("validated");
        let key = std::env::var(var).map_err(|_| BackendError::MissingCredential(var.to_owned()))?;
        let body = self.request_body(request);
        let mut attempt = 0;
        loop {
            match self.attempt(&body, &key) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_transient() && attempt < self.config.max_retries => {
                    let delay = Duration::from_millis(self.config.backoff_ms.saturating_mul(1 << attempt.min(16)));
                    tracing::warn!(attempt = attempt + 1, error = %e, ?delay, "retrying chat completion");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn is_deterministic(&self) -> bool {
        false
    }
}
