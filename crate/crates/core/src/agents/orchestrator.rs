//! The case loop: the generator proposes, the verifier examines each
//! proposal through its scheme's critical questions, and once the dialogue
//! ends the transcript is compiled into a framework and solved.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backend::{AgentBackend, BackendError, CompletionRequest, Role};
use super::parse::{parse_response, ParsedResponse};
use super::prompts::{PromptError, PromptSet, Vars};
use crate::aaf::{format, Argument, ArgumentId, ArgumentKind, ArgumentationFramework};
use crate::decision::{self, DecisionError, DecisionReport};
use crate::dialogue::{DialogueError, DialogueTranscript, Payload, SessionConfig, TerminationReason};
use crate::schemes::{SchemeError, SchemeRegistry};

/// A clinical question to reason about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub case_id: String,
    pub text: String,
}

impl Case {
    /// A `.json` file holds `{"case_id": ..., "text": ...}`; anything else is
    /// the case text itself, identified by the file stem.
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let source = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            return serde_json::from_str(&source)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e));
        }
        let case_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("case")
            .to_owned();
        Ok(Self {
            case_id,
            text: source.trim().to_owned(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionOutcome {
    pub case_id: String,
    pub transcript: DialogueTranscript,
    pub framework: ArgumentationFramework,
    pub report: DecisionReport,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("{role} backend failed: {source}")]
    BackendFailure {
        role: Role,
        source: BackendError,
        /// What was settled before the failure.
        partial: Option<Box<SessionOutcome>>,
    },
    #[error("{role} reply unusable after a reprompt: {diagnostic}")]
    ParseFailure { role: Role, diagnostic: String },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Dialogue(#[from] DialogueError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("cannot write bundle: {0}")]
    Io(#[from] std::io::Error),
}

/// Outcome of examining one proposal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject { cq_id: String, reason: String },
}

/// Everything a case run needs besides the case itself.
pub struct Orchestrator<'a> {
    pub generator: &'a dyn AgentBackend,
    pub verifier: &'a dyn AgentBackend,
    pub registry: &'a SchemeRegistry,
    pub prompts: &'a PromptSet,
    pub config: SessionConfig,
}

/// Bijective base-26 labels: A..Z, AA, AB, ...
pub fn argument_label(mut n: usize) -> ArgumentId {
    let mut chars = Vec::new();
    loop {
        chars.push((b'A' + (n % 26) as u8) as char);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    ArgumentId::new(chars.into_iter().rev().collect::<String>())
}

fn vars<const N: usize>(pairs: [(&str, String); N]) -> Vars {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

pub fn describe_argument(arg: &Argument) -> String {
    let mut out = String::new();
    for p in &arg.premises {
        let _ = writeln!(out, "- {p}");
    }
    let _ = write!(out, "Therefore: {}", arg.conclusion);
    out
}

pub fn describe_transcript(t: &DialogueTranscript) -> String {
    if t.is_empty() {
        return "(nothing yet)".into();
    }
    let mut out = String::new();
    for m in &t.moves {
        let _ = match &m.payload {
            Payload::ProposeArgument {
                argument,
                attacks_target,
            } => {
                let scheme = argument.scheme_id.as_deref().unwrap_or("-");
                let attack = attacks_target
                    .as_ref()
                    .map(|t| format!(", attacking {t}"))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "{}. generator proposes {} ({}, {scheme}{attack}): {}",
                    m.index, argument.id, argument.kind, argument.conclusion
                )
            }
            Payload::PoseCq {
                cq_id,
                target,
                rejected,
                reason,
            } => {
                let verb = if *rejected { "rejects" } else { "questions" };
                writeln!(out, "{}. verifier {verb} {target} on {cq_id}: {reason}", m.index)
            }
            Payload::AcceptArgument { target } => {
                writeln!(out, "{}. verifier accepts {target}", m.index)
            }
        };
    }
    out.trim_end().to_owned()
}

fn scheme_catalogue(registry: &SchemeRegistry) -> String {
    registry
        .schemes()
        .map(|s| {
            format!(
                "- {} ({}): variables [{}]; concludes \"{}\"",
                s.id,
                s.produces_kind,
                s.variables.join(", "),
                s.conclusion_template
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Asks `backend` once, reprompting once with a diagnostic when `accept`
/// refuses the reply.
fn ask(
    backend: &dyn AgentBackend,
    prompts: &PromptSet,
    request: CompletionRequest,
    accept: impl Fn(ParsedResponse) -> Result<ParsedResponse, String>,
) -> Result<ParsedResponse, AgentError> {
    let role = request.role;
    let call = |req: &CompletionRequest| {
        backend.complete(req).map_err(|source| AgentError::BackendFailure {
            role,
            source,
            partial: None,
        })
    };
    let diagnostic = match accept(parse_response(&call(&request)?)) {
        Ok(reply) => return Ok(reply),
        Err(d) => d,
    };
    let mut retry = request;
    let note = prompts.render("reprompt", &vars([("diagnostic", diagnostic)]))?;
    retry.instruction = format!("{}\n\n{note}", retry.instruction);
    accept(parse_response(&call(&retry)?)).map_err(|diagnostic| AgentError::ParseFailure { role, diagnostic })
}

/// One generator turn: a usable [`ParsedResponse::NewArgument`] (known
/// scheme, complete binding) or [`ParsedResponse::Done`].
pub fn generator_step(
    backend: &dyn AgentBackend,
    registry: &SchemeRegistry,
    prompts: &PromptSet,
    request: CompletionRequest,
) -> Result<ParsedResponse, AgentError> {
    ask(backend, prompts, request, |reply| match reply {
        ParsedResponse::NewArgument {
            scheme_id,
            bindings,
            attacks_target,
        } => match registry.complete_binding(&scheme_id, &bindings) {
            Ok(bindings) => Ok(ParsedResponse::NewArgument {
                scheme_id,
                bindings,
                attacks_target,
            }),
            Err(e) => Err(e.to_string()),
        },
        ParsedResponse::Done => Ok(ParsedResponse::Done),
        ParsedResponse::CqVerdict { .. } => Err("expected an argument or done, got a verdict".into()),
        ParsedResponse::Unparseable { diagnostic, .. } => Err(diagnostic),
    })
}

/// Runs the critical questions of `argument`'s scheme in registry order.
/// The first rejection ends the examination.
pub fn verifier_step(
    backend: &dyn AgentBackend,
    registry: &SchemeRegistry,
    prompts: &PromptSet,
    system: &str,
    context: &str,
    argument: &Argument,
) -> Result<Verdict, AgentError> {
    let Some(scheme_id) = argument.scheme_id.as_deref() else {
        return Ok(Verdict::Accept);
    };
    for question in registry.critical_questions_for(scheme_id, &argument.bindings)? {
        let instruction = prompts.render(
            "verify_question",
            &vars([
                ("target", argument.id.to_string()),
                ("scheme", scheme_id.to_owned()),
                ("argument", describe_argument(argument)),
                ("question_id", question.id.clone()),
                ("question", question.text.clone()),
            ]),
        )?;
        let request = CompletionRequest {
            role: Role::Verifier,
            system: system.to_owned(),
            context: context.to_owned(),
            instruction,
        };
        let reply = ask(backend, prompts, request, |reply| match reply {
            ParsedResponse::CqVerdict { cq_id, .. } if cq_id.as_deref().is_some_and(|c| c != question.id) => {
                Err(format!("verdict names {}, expected {}", cq_id.unwrap_or_default(), question.id))
            }
            v @ ParsedResponse::CqVerdict { .. } => Ok(v),
            ParsedResponse::Unparseable { diagnostic, .. } => Err(diagnostic),
            _ => Err("expected a verdict".into()),
        })?;
        if let ParsedResponse::CqVerdict {
            rejected: true,
            reason,
            ..
        } = reply
        {
            return Ok(Verdict::Reject {
                cq_id: question.id,
                reason,
            });
        }
    }
    Ok(Verdict::Accept)
}

enum Turn {
    Proposed(Argument),
    Finished(TerminationReason),
}

impl Orchestrator<'_> {
    pub fn run_case(&self, case: &Case) -> Result<SessionOutcome, AgentError> {
        let mut transcript = DialogueTranscript::new_session(self.config)?;
        let catalogue = vars([("schemes", scheme_catalogue(self.registry))]);
        let generator_system = PromptSet::with_examples(
            self.prompts.render("generator_system", &catalogue)?,
            &self.prompts.few_shot_generator,
        );
        let verifier_system = PromptSet::with_examples(
            self.prompts.render("verifier_system", &catalogue)?,
            &self.prompts.few_shot_verifier,
        );

        while transcript.is_active() {
            let turn = match self.generator_turn(case, &mut transcript, &generator_system) {
                Ok(turn) => turn,
                Err(e) => return self.fail(case, transcript, e),
            };
            let argument = match turn {
                Turn::Finished(reason) => {
                    transcript.close(reason);
                    break;
                }
                Turn::Proposed(argument) => argument,
            };
            if !transcript.is_active() {
                break;
            }
            let context = self.context(case, &transcript)?;
            let verdict = verifier_step(
                self.verifier,
                self.registry,
                self.prompts,
                &verifier_system,
                &context,
                &argument,
            );
            let payload = match verdict {
                Ok(Verdict::Accept) => Payload::AcceptArgument {
                    target: argument.id.clone(),
                },
                Ok(Verdict::Reject { cq_id, reason }) => Payload::PoseCq {
                    cq_id,
                    target: argument.id.clone(),
                    rejected: true,
                    reason,
                },
                Err(AgentError::ParseFailure { .. }) => {
                    transcript.close(TerminationReason::Parse);
                    break;
                }
                Err(e) => return self.fail(case, transcript, e),
            };
            transcript.push(payload)?;
        }
        self.finish(case, transcript)
    }

    fn context(&self, case: &Case, t: &DialogueTranscript) -> Result<String, AgentError> {
        Ok(self.prompts.render(
            "context",
            &vars([
                ("case_id", case.case_id.clone()),
                ("case", case.text.clone()),
                ("transcript", describe_transcript(t)),
            ]),
        )?)
    }

    fn instruction(&self, t: &DialogueTranscript) -> Result<String, AgentError> {
        if let Some(target) = t.open_rejection() {
            let (cq_id, reason) = t
                .moves
                .last()
                .and_then(|m| match &m.payload {
                    Payload::PoseCq { cq_id, reason, .. } => Some((cq_id.clone(), reason.clone())),
                    _ => None,
                })
                .expect("open rejection is the last move");
            let rejected = t.proposed(target).expect("rejected argument was proposed");
            let question = rejected
                .scheme_id
                .as_deref()
                .and_then(|s| self.registry.critical_questions_for(s, &rejected.bindings).ok())
                .and_then(|qs| qs.into_iter().find(|q| q.id == cq_id));
            let (text, scheme) = match question {
                Some(q) => (q.text, q.on_reject_scheme.unwrap_or_else(|| "any suitable scheme".into())),
                None => (cq_id.clone(), "any suitable scheme".into()),
            };
            return Ok(self.prompts.render(
                "counter_argument",
                &vars([
                    ("target", target.to_string()),
                    ("target_text", rejected.conclusion.clone()),
                    ("question_id", cq_id),
                    ("question", text),
                    ("reason", reason),
                    ("scheme", scheme),
                ]),
            )?);
        }
        if t.decision_count() == 0 {
            return Ok(self.prompts.render("propose_decision", &Vars::new())?);
        }
        let left = self.config.max_decisions.saturating_sub(t.decision_count());
        Ok(self
            .prompts
            .render("continue_discussion", &vars([("decisions_left", left.to_string())]))?)
    }

    /// Asks for the next proposal and submits it. An illegal proposal gets
    /// one corrective reprompt.
    fn generator_turn(
        &self,
        case: &Case,
        transcript: &mut DialogueTranscript,
        system: &str,
    ) -> Result<Turn, AgentError> {
        let mut request = CompletionRequest {
            role: Role::Generator,
            system: system.to_owned(),
            context: self.context(case, transcript)?,
            instruction: self.instruction(transcript)?,
        };
        for attempt in 0..2 {
            let reply = match generator_step(self.generator, self.registry, self.prompts, request.clone()) {
                Ok(reply) => reply,
                Err(AgentError::ParseFailure { .. }) => return Ok(Turn::Finished(TerminationReason::Parse)),
                Err(e) => return Err(e),
            };
            let ParsedResponse::NewArgument {
                scheme_id,
                bindings,
                attacks_target,
            } = reply
            else {
                return Ok(Turn::Finished(TerminationReason::Accepted));
            };
            let id = argument_label(transcript.proposals().count());
            let argument = self.registry.instantiate(&scheme_id, &bindings, id)?;
            let problem = if transcript.decision_count() == 0 && argument.kind != ArgumentKind::Decision {
                Some("the first proposal must be a treatment decision".to_owned())
            } else {
                let m = transcript.next_move(Payload::ProposeArgument {
                    argument: argument.clone(),
                    attacks_target: attacks_target.clone(),
                });
                transcript.check(&m).err().map(|e| e.to_string())
            };
            match problem {
                None => {
                    transcript.push(Payload::ProposeArgument {
                        argument: argument.clone(),
                        attacks_target,
                    })?;
                    return Ok(Turn::Proposed(argument));
                }
                Some(diagnostic) if attempt == 0 => {
                    tracing::debug!(%diagnostic, "illegal proposal, reprompting");
                    let note = self.prompts.render("reprompt", &vars([("diagnostic", diagnostic)]))?;
                    request.instruction = format!("{}\n\n{note}", request.instruction);
                }
                Some(_) => {}
            }
        }
        Ok(Turn::Finished(TerminationReason::Protocol))
    }

    fn finish(&self, case: &Case, transcript: DialogueTranscript) -> Result<SessionOutcome, AgentError> {
        let framework = transcript.to_framework()?;
        let report = decision::exclusivity_filter(&framework, decision::detect_reasoning_error(&framework)?)?;
        Ok(SessionOutcome {
            case_id: case.case_id.clone(),
            transcript,
            framework,
            report,
        })
    }

    /// Closes the session, compiles what was settled and attaches it to a
    /// backend failure.
    fn fail(
        &self,
        case: &Case,
        mut transcript: DialogueTranscript,
        error: AgentError,
    ) -> Result<SessionOutcome, AgentError> {
        match error {
            AgentError::BackendFailure { role, source, .. } => {
                transcript.close(TerminationReason::Backend);
                let partial = self.finish(case, transcript).ok().map(Box::new);
                Err(AgentError::BackendFailure { role, source, partial })
            }
            other => Err(other),
        }
    }
}

pub fn run_case(
    case: &Case,
    generator: &dyn AgentBackend,
    verifier: &dyn AgentBackend,
    registry: &SchemeRegistry,
    prompts: &PromptSet,
    config: SessionConfig,
) -> Result<SessionOutcome, AgentError> {
    Orchestrator {
        generator,
        verifier,
        registry,
        prompts,
        config,
    }
    .run_case(case)
}

/// File names of a session bundle.
/// One directory per case, named after its id.
pub struct BundlePaths {
    pub dir: PathBuf,
    pub transcript: PathBuf,
    pub framework: PathBuf,
    pub report: PathBuf,
}

impl BundlePaths {
    pub fn new(out_dir: &Path, case_id: &str) -> Self {
        let dir = out_dir.join(case_id);
        Self {
            transcript: dir.join("transcript.json"),
            framework: dir.join("framework.json"),
            report: dir.join("report.json"),
            dir,
        }
    }
}

impl SessionOutcome {
    pub fn transcript_json(&self) -> String {
        serde_json::to_string_pretty(&self.transcript).expect("transcript serializes") + "\n"
    }

    pub fn framework_json(&self) -> String {
        format::to_json(&self.framework) + "\n"
    }

    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes") + "\n"
    }

    /// Writes transcript, framework and report under `dir`.
    pub fn write_bundle(&self, out_dir: &Path) -> std::io::Result<BundlePaths> {
        let paths = BundlePaths::new(out_dir, &self.case_id);
        std::fs::create_dir_all(&paths.dir)?;
        std::fs::write(&paths.transcript, self.transcript_json())?;
        std::fs::write(&paths.framework, self.framework_json())?;
        std::fs::write(&paths.report, self.report_json())?;
        Ok(paths)
    }

    /// Recompiles the transcript and re-solves the framework; both must
    /// reproduce what is stored.
    pub fn is_consistent(&self) -> bool {
        let Ok(framework) = self.transcript.to_framework() else {
            return false;
        };
        let report = decision::detect_reasoning_error(&framework)
            .and_then(|r| decision::exclusivity_filter(&framework, r));
        framework == self.framework && report.ok().as_ref() == Some(&self.report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let got: Vec<String> = [0, 1, 25, 26, 27, 51, 52, 701, 702]
            .into_iter()
            .map(|n| argument_label(n).to_string())
            .collect();
        assert_eq!(got, ["A", "B", "Z", "AA", "AB", "AZ", "BA", "ZZ", "AAA"]);
    }
}
