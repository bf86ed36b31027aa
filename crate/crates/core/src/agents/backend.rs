//! Text-generation backends.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::dialogue::Speaker as Role;

/// One call to a backend: who is speaking and what it is shown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub role: Role,
    pub system: String,
    pub context: String,
    pub instruction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("{role} script exhausted after {served} completion(s)")]
    Exhausted { role: Role, served: usize },
    #[error("recording diverged at exchange {index}: {detail}")]
    Diverged { index: usize, detail: String },
    #[error("environment variable `{0}` holding the credential is not set")]
    MissingCredential(String),
    #[error("request timed out")]
    Timeout,
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Response(String),
    #[error("backend config: {0}")]
    Config(String),
}

impl BackendError {
    /// Worth retrying: timeouts, connection trouble, 429 and 5xx.
    pub fn is_transient(&self) -> bool {
        match self {
            BackendError::Timeout | BackendError::Transport(_) => true,
            BackendError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait AgentBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError>;

    /// Same requests always give the same completions.
    fn is_deterministic(&self) -> bool;
}

impl<B: AgentBackend + ?Sized> AgentBackend for Box<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }

    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

/// Serves canned completions in order and remembers what it was asked.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    script: Mutex<VecDeque<String>>,
    calls: Mutex<Vec<CompletionRequest>>,
}

impl ScriptedBackend {
    pub fn new<S: Into<String>>(script: impl IntoIterator<Item = S>) -> Self {
        Self {
            script: Mutex::new(script.into_iter().map(Into::into).collect()),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Reads a JSON array of completion strings.
    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        let script: Vec<String> = serde_json::from_str(&source)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::new(script))
    }

    pub fn calls(&self) -> Vec<CompletionRequest> {
        self.calls.lock().unwrap().clone()
    }

    pub fn remaining(&self) -> usize {
        self.script.lock().unwrap().len()
    }
}

impl AgentBackend for ScriptedBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let mut calls = self.calls.lock().unwrap();
        calls.push(request.clone());
        self.script
            .lock()
            .unwrap()
            .pop_front()
            .ok_or(BackendError::Exhausted {
                role: request.role,
                served: calls.len() - 1,
            })
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: CompletionRequest,
    pub completion: String,
}

/// Wraps a backend and keeps every successful exchange.
pub struct RecordingBackend<B> {
    inner: B,
    log: Mutex<Vec<Exchange>>,
}

impl<B: AgentBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn exchanges(&self) -> Vec<Exchange> {
        self.log.lock().unwrap().clone()
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(&self.exchanges()).expect("exchanges serialize");
        std::fs::write(path, json + "\n")
    }
}

impl<B: AgentBackend> AgentBackend for RecordingBackend<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let completion = self.inner.complete(request)?;
        self.log.lock().unwrap().push(Exchange {
            request: request.clone(),
            completion: completion.clone(),
        });
        Ok(completion)
    }

    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
}

/// Replays a saved session. Each request must match the recorded one.
#[derive(Debug)]
pub struct RecordedBackend {
    exchanges: Vec<Exchange>,
    cursor: Mutex<usize>,
}

impl RecordedBackend {
    pub fn new(exchanges: Vec<Exchange>) -> Self {
        Self {
            exchanges,
            cursor: Mutex::new(0),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        let exchanges = serde_json::from_str(&source)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::new(exchanges))
    }
}

impl AgentBackend for RecordedBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, BackendError> {
        let mut cursor = self.cursor.lock().unwrap();
        let index = *cursor;
        let exchange = self.exchanges.get(index).ok_or(BackendError::Exhausted {
            role: request.role,
            served: index,
        })?;
        if &exchange.request != request {
            let detail = if exchange.request.role != request.role {
                format!("expected a {} call, got {}", exchange.request.role, request.role)
            } else {
                "request text differs from the recording".to_owned()
            };
            return Err(BackendError::Diverged { index, detail });
        }
        *cursor += 1;
        Ok(exchange.completion.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}
