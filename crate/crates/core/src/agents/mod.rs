//! Language-model roles: backends, reply parsing, prompts and the case loop.

pub mod backend;
mod orchestrator;
pub mod parse;
pub mod prompts;
pub mod remote;

pub use backend::{
    AgentBackend, BackendError, CompletionRequest, Exchange, RecordedBackend, RecordingBackend, Role,
    ScriptedBackend,
};
pub use orchestrator::{
    argument_label, describe_argument, describe_transcript, generator_step, run_case, verifier_step, AgentError,
    BundlePaths, Case, Orchestrator, SessionOutcome, Verdict,
};
pub use parse::{parse_response, ParsedResponse};
pub use prompts::{PromptError, PromptSet};
pub use remote::{BackendConfig, BackendKind, RemoteBackend, DEFAULT_TEMPERATURE};
