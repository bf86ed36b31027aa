//! The generator/verifier interaction protocol.
//!
//! A transcript is an ordered list of moves. The generator proposes
//! arguments, optionally naming the argument each one attacks; the verifier
//! answers the proposal it was just given, either rejecting it through a
//! critical question or accepting it. The rules checked on every move:
//!
//! * proposals come from the generator, questions and acceptances from the
//!   verifier;
//! * a verifier move answers the immediately preceding proposal, so each
//!   proposal is examined at most once and acceptance is final;
//! * a proposal attacking the previous proposal needs a verifier rejection
//!   of it in between;
//! * after a rejection the next proposal must attack the rejected argument;
//! * attack targets must already be proposed, and decisions may not attack
//!   beliefs;
//! * at most `max_decisions` decision proposals and `dialogue_limit` moves
//!   (both speakers count).
//!
//! An acceptance closes a round but not the session: the session ends when
//! the move limit is hit or when [`DialogueTranscript::close`] is called.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aaf::{Argument, ArgumentId, ArgumentKind, ArgumentationFramework, FrameworkError};

pub const DEFAULT_DIALOGUE_LIMIT: usize = 8;
pub const DEFAULT_MAX_DECISIONS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Generator,
    Verifier,
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Speaker::Generator => f.write_str("generator"),
            Speaker::Verifier => f.write_str("verifier"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    ProposeArgument {
        argument: Argument,
        #[serde(default)]
        attacks_target: Option<ArgumentId>,
    },
    PoseCq {
        cq_id: String,
        target: ArgumentId,
        rejected: bool,
        #[serde(default)]
        reason: String,
    },
    AcceptArgument {
        target: ArgumentId,
    },
}

impl Payload {
    pub fn speaker(&self) -> Speaker {
        match self {
            Payload::ProposeArgument { .. } => Speaker::Generator,
            Payload::PoseCq { .. } | Payload::AcceptArgument { .. } => Speaker::Verifier,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Payload::ProposeArgument { .. } => "propose_argument",
            Payload::PoseCq { .. } => "pose_cq",
            Payload::AcceptArgument { .. } => "accept_argument",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    /// 1-based position in the transcript.
    pub index: usize,
    pub speaker: Speaker,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub dialogue_limit: usize,
    pub max_decisions: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            dialogue_limit: DEFAULT_DIALOGUE_LIMIT,
            max_decisions: DEFAULT_MAX_DECISIONS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// The move limit was reached.
    Limit,
    /// The generator had nothing further and every round was closed.
    Accepted,
    /// The generator produced no parseable reply twice in a row.
    Parse,
    /// The generator insisted on an illegal move.
    Protocol,
    /// A backend stopped answering.
    Backend,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TerminationReason::Limit => "limit",
            TerminationReason::Accepted => "accepted",
            TerminationReason::Parse => "parse",
            TerminationReason::Protocol => "protocol",
            TerminationReason::Backend => "backend",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "reason", rename_all = "snake_case")]
pub enum Status {
    Active,
    Terminated(TerminationReason),
}

/// Why a move was refused.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Illegal {
    #[error("session already terminated")]
    Terminated,
    #[error("expected move index {expected}, got {got}")]
    IndexMismatch { expected: usize, got: usize },
    #[error("{payload} cannot come from the {speaker}")]
    WrongSpeaker { speaker: Speaker, payload: &'static str },
    #[error("dialogue limit of {0} moves reached")]
    LimitReached(usize),
    #[error("argument `{0}` was already proposed")]
    DuplicateArgument(ArgumentId),
    #[error("argument `{0}` is malformed")]
    MalformedArgument(ArgumentId),
    #[error("attack target `{0}` has not been proposed")]
    UnknownTarget(ArgumentId),
    #[error("decision `{from}` may not attack belief `{to}`")]
    ForbiddenAttack { from: ArgumentId, to: ArgumentId },
    #[error("decision cap of {0} reached")]
    DecisionCap(usize),
    #[error("attack on the previous proposal `{0}` without a verifier rejection in between")]
    AttackWithoutRejection(ArgumentId),
    #[error("the rejection of `{0}` must be answered by an attack on it")]
    UnansweredRejection(ArgumentId),
    #[error("no fresh proposal for the verifier to examine")]
    NothingToExamine,
    #[error("verifier must answer `{expected}`, not `{got}`")]
    WrongTarget { expected: ArgumentId, got: ArgumentId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("illegal move: {0}")]
    IllegalMove(Illegal),
    #[error("session already terminated")]
    SessionTerminated,
    #[error("illegal move at index {index}: {reason}")]
    IllegalMoveAt { index: usize, reason: Illegal },
    #[error("session is still active")]
    SessionActive,
    #[error(transparent)]
    Framework(#[from] FrameworkError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueTranscript {
    pub config: SessionConfig,
    pub moves: Vec<Move>,
    pub status: Status,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), DialogueError> {
        if self.dialogue_limit == 0 {
            return Err(DialogueError::InvalidConfig("dialogue_limit must be at least 1".into()));
        }
        if self.max_decisions == 0 {
            return Err(DialogueError::InvalidConfig("max_decisions must be at least 1".into()));
        }
        Ok(())
    }
}

impl DialogueTranscript {
    pub fn new_session(config: SessionConfig) -> Result<Self, DialogueError> {
        config.validate()?;
        Ok(Self {
            config,
            moves: Vec::new(),
            status: Status::Active,
        })
    }

    pub fn is_active(&self) -> bool {
        self.status == Status::Active
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn proposals(&self) -> impl Iterator<Item = (usize, &Argument, Option<&ArgumentId>)> {
        self.moves.iter().filter_map(|m| match &m.payload {
            Payload::ProposeArgument {
                argument,
                attacks_target,
            } => Some((m.index, argument, attacks_target.as_ref())),
            _ => None,
        })
    }

    pub fn proposed(&self, id: &ArgumentId) -> Option<&Argument> {
        self.proposals().map(|(_, a, _)| a).find(|a| &a.id == id)
    }

    pub fn decision_count(&self) -> usize {
        self.proposals()
            .filter(|(_, a, _)| a.kind == ArgumentKind::Decision)
            .count()
    }

    /// Move index of each proposal, by argument id.
    pub fn proposal_indices(&self) -> BTreeMap<ArgumentId, usize> {
        self.proposals()
            .map(|(i, a, _)| (a.id.clone(), i))
            .collect()
    }

    fn last_proposal(&self) -> Option<(usize, &Argument)> {
        self.proposals().last().map(|(i, a, _)| (i, a))
    }

    /// The argument whose rejection is awaiting an answer, if the last move
    /// was a rejection.
    pub fn open_rejection(&self) -> Option<&ArgumentId> {
        match self.moves.last().map(|m| &m.payload) {
            Some(Payload::PoseCq {
                target,
                rejected: true,
                ..
            }) => Some(target),
            _ => None,
        }
    }

    /// The proposal the verifier should examine next, if any.
    pub fn awaiting_verdict(&self) -> Option<&Argument> {
        match self.moves.last().map(|m| &m.payload) {
            Some(Payload::ProposeArgument { argument, .. }) => Some(argument),
            _ => None,
        }
    }

    pub fn check(&self, m: &Move) -> Result<(), Illegal> {
        if !self.is_active() {
            return Err(Illegal::Terminated);
        }
        let expected = self.moves.len() + 1;
        if m.index != expected {
            return Err(Illegal::IndexMismatch {
                expected,
                got: m.index,
            });
        }
        if self.moves.len() >= self.config.dialogue_limit {
            return Err(Illegal::LimitReached(self.config.dialogue_limit));
        }
        if m.payload.speaker() != m.speaker {
            return Err(Illegal::WrongSpeaker {
                speaker: m.speaker,
                payload: m.payload.name(),
            });
        }
        match &m.payload {
            Payload::ProposeArgument {
                argument,
                attacks_target,
            } => self.check_proposal(argument, attacks_target.as_ref()),
            Payload::PoseCq { target, .. } | Payload::AcceptArgument { target } => {
                let fresh = self.awaiting_verdict().ok_or(Illegal::NothingToExamine)?;
                if &fresh.id != target {
                    return Err(Illegal::WrongTarget {
                        expected: fresh.id.clone(),
                        got: target.clone(),
                    });
                }
                Ok(())
            }
        }
    }

    fn check_proposal(&self, argument: &Argument, target: Option<&ArgumentId>) -> Result<(), Illegal> {
        if argument.id.as_str().trim().is_empty() || argument.conclusion.trim().is_empty() {
            return Err(Illegal::MalformedArgument(argument.id.clone()));
        }
        if self.proposed(&argument.id).is_some() {
            return Err(Illegal::DuplicateArgument(argument.id.clone()));
        }
        if argument.kind == ArgumentKind::Decision
            && self.decision_count() >= self.config.max_decisions
        {
            return Err(Illegal::DecisionCap(self.config.max_decisions));
        }
        if let Some(t) = target {
            let attacked = self
                .proposed(t)
                .ok_or_else(|| Illegal::UnknownTarget(t.clone()))?;
            if argument.kind == ArgumentKind::Decision && attacked.kind == ArgumentKind::Belief {
                return Err(Illegal::ForbiddenAttack {
                    from: argument.id.clone(),
                    to: t.clone(),
                });
            }
        }
        if let Some(rejected) = self.open_rejection() {
            if target != Some(rejected) {
                return Err(Illegal::UnansweredRejection(rejected.clone()));
            }
        }
        if let (Some(t), Some((j, previous))) = (target, self.last_proposal()) {
            if &previous.id == t {
                let rejected_between = self.moves[j..].iter().any(|m| {
                    matches!(&m.payload, Payload::PoseCq { target, rejected: true, .. } if target == t)
                });
                if !rejected_between {
                    return Err(Illegal::AttackWithoutRejection(t.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, m: &Move) -> bool {
        self.check(m).is_ok()
    }

    pub fn submit_move(&mut self, m: Move) -> Result<(), DialogueError> {
        if !self.is_active() {
            return Err(DialogueError::SessionTerminated);
        }
        self.check(&m).map_err(DialogueError::IllegalMove)?;
        self.moves.push(m);
        if self.moves.len() >= self.config.dialogue_limit {
            self.status = Status::Terminated(TerminationReason::Limit);
        }
        Ok(())
    }

    /// Builds the next move for `payload` and submits it.
    pub fn push(&mut self, payload: Payload) -> Result<(), DialogueError> {
        let m = self.next_move(payload);
        self.submit_move(m)
    }

    pub fn next_move(&self, payload: Payload) -> Move {
        Move {
            index: self.moves.len() + 1,
            speaker: payload.speaker(),
            payload,
        }
    }

    /// Ends an active session. A terminated session keeps its first reason.
    pub fn close(&mut self, reason: TerminationReason) {
        if self.is_active() {
            self.status = Status::Terminated(reason);
        }
    }

    pub fn to_framework(&self) -> Result<ArgumentationFramework, DialogueError> {
        if self.is_active() {
            return Err(DialogueError::SessionActive);
        }
        let mut fw = ArgumentationFramework::new();
        for (_, argument, target) in self.proposals() {
            fw.add_argument(argument.clone())?;
            if let Some(t) = target {
                fw.add_attack(argument.id.clone(), t.clone())?;
            }
        }
        debug_assert!(fw.validate().is_valid());
        Ok(fw)
    }
}

/// Re-applies `moves` to a fresh session, stopping at the first illegal one.
pub fn replay(moves: &[Move], config: SessionConfig) -> Result<DialogueTranscript, DialogueError> {
    let mut t = DialogueTranscript::new_session(config)?;
    for m in moves {
        let index = t.len() + 1;
        match t.submit_move(m.clone()) {
            Ok(()) => {}
            Err(DialogueError::IllegalMove(reason)) => {
                return Err(DialogueError::IllegalMoveAt { index, reason })
            }
            Err(DialogueError::SessionTerminated) => {
                let reason = match t.status {
                    Status::Terminated(TerminationReason::Limit) => {
                        Illegal::LimitReached(config.dialogue_limit)
                    }
                    _ => Illegal::Terminated,
                };
                return Err(DialogueError::IllegalMoveAt { index, reason });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

/// Replays a recorded transcript and restores its recorded termination.
pub fn replay_transcript(recorded: &DialogueTranscript) -> Result<DialogueTranscript, DialogueError> {
    let mut t = replay(&recorded.moves, recorded.config)?;
    if let Status::Terminated(reason) = recorded.status {
        t.close(reason);
    }
    Ok(t)
}
