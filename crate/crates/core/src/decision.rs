//! Optional decisions, explanation sets and reasoning-error detection.
//!
//! A decision is optional when some preferred extension contains it. The
//! explanation sets are the preferred extensions that contain a decision;
//! because distinct decisions attack each other, each holds exactly one.
//! When no decision is optional the report raises its error flag.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aaf::{ArgumentId, ArgumentKind, ArgumentationFramework, ValidationReport};
use crate::semantics::{self, Extension};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("framework is not well-formed ({} violation(s))", .0.violations.len())]
    InvalidFramework(ValidationReport),
    #[error("explanation set for `{decision}` contains {count} decisions")]
    Inconsistent { decision: ArgumentId, count: usize },
}

/// One decision together with the arguments that jointly support it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExplanationSet {
    pub decision: ArgumentId,
    pub supporters: Vec<ArgumentId>,
}

impl ExplanationSet {
    pub fn full_set(&self) -> BTreeSet<ArgumentId> {
        self.supporters
            .iter()
            .chain(std::iter::once(&self.decision))
            .cloned()
            .collect()
    }

    fn from_extension(fw: &ArgumentationFramework, ext: &Extension) -> Option<Self> {
        let decision = ext
            .iter()
            .find(|id| fw.kind_of(id) == Ok(ArgumentKind::Decision))?
            .clone();
        let supporters = ext.iter().filter(|id| **id != decision).cloned().collect();
        Some(Self {
            decision,
            supporters,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub optional_decisions: Vec<ArgumentId>,
    pub explanation_sets: Vec<ExplanationSet>,
    pub error_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_note: Option<String>,
    /// Set once the sets have been checked to be alternatives rather than a
    /// joint plan.
    #[serde(default)]
    pub exclusive_alternatives: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecisionSemantics {
    /// Credulous acceptance under preferred semantics.
    #[default]
    Preferred,
    /// Sceptical: only the grounded extension counts.
    Grounded,
}

fn ensure_valid(fw: &ArgumentationFramework) -> Result<(), DecisionError> {
    let report = fw.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(DecisionError::InvalidFramework(report))
    }
}

pub fn optional_decisions(fw: &ArgumentationFramework) -> Result<Vec<ArgumentId>, DecisionError> {
    ensure_valid(fw)?;
    let preferred = semantics::preferred_extensions(fw);
    Ok(decisions_in(fw, &preferred))
}

fn decisions_in(fw: &ArgumentationFramework, extensions: &[Extension]) -> Vec<ArgumentId> {
    fw.decisions()
        .filter(|d| extensions.iter().any(|e| e.contains(d)))
        .cloned()
        .collect()
}

pub fn explanation_sets(fw: &ArgumentationFramework) -> Result<Vec<ExplanationSet>, DecisionError> {
    ensure_valid(fw)?;
    Ok(sets_from(fw, &semantics::preferred_extensions(fw)))
}

fn sets_from(fw: &ArgumentationFramework, extensions: &[Extension]) -> Vec<ExplanationSet> {
    let mut sets: Vec<ExplanationSet> = extensions
        .iter()
        .filter_map(|e| ExplanationSet::from_extension(fw, e))
        .collect();
    sets.sort_by_key(|s| s.full_set().into_iter().collect::<Vec<_>>());
    sets
}

pub fn detect_reasoning_error(fw: &ArgumentationFramework) -> Result<DecisionReport, DecisionError> {
    report_under(fw, DecisionSemantics::Preferred)
}

pub fn report_under(
    fw: &ArgumentationFramework,
    mode: DecisionSemantics,
) -> Result<DecisionReport, DecisionError> {
    ensure_valid(fw)?;
    let preferred = semantics::preferred_extensions(fw);
    let accepted = match mode {
        DecisionSemantics::Preferred => preferred.clone(),
        DecisionSemantics::Grounded => vec![semantics::grounded_extension(fw)],
    };
    let optional = decisions_in(fw, &accepted);
    let sets = sets_from(fw, &accepted);
    let error_flag = optional.is_empty();
    let error_note = error_flag.then(|| error_note(fw, &preferred));
    Ok(DecisionReport {
        optional_decisions: optional,
        explanation_sets: sets,
        error_flag,
        error_note,
        exclusive_alternatives: false,
    })
}

fn error_note(fw: &ArgumentationFramework, preferred: &[Extension]) -> String {
    let decisions: Vec<&ArgumentId> = fw.decisions().collect();
    if decisions.is_empty() {
        return "no decision argument in the framework; nothing can be recommended".into();
    }
    let credulous: BTreeSet<&ArgumentId> = preferred.iter().flat_map(|e| e.iter()).collect();
    let mut note = String::from("no decision is acceptable:");
    for d in decisions {
        let unresolved: Vec<String> = fw
            .attackers(d)
            .unwrap_or_default()
            .into_iter()
            .filter(|a| fw.kind_of(a) == Ok(ArgumentKind::Belief) && credulous.contains(a))
            .map(|a| a.to_string())
            .collect();
        if unresolved.is_empty() {
            let _ = write!(note, " {d} has no admissible defence;");
        } else {
            let _ = write!(note, " {d} defeated by {};", unresolved.join(", "));
        }
    }
    let beliefs: Vec<String> = preferred
        .iter()
        .filter(|e| !e.is_empty())
        .map(|e| e.to_string())
        .collect();
    if beliefs.is_empty() {
        note.push_str(" no coherent belief set");
    } else {
        let _ = write!(note, " coherent belief sets: {}", beliefs.join(" "));
    }
    note
}

/// Checks that every explanation set holds a single decision and marks the
/// sets as mutually exclusive alternatives.
pub fn exclusivity_filter(
    fw: &ArgumentationFramework,
    mut report: DecisionReport,
) -> Result<DecisionReport, DecisionError> {
    for set in &report.explanation_sets {
        let count = set
            .full_set()
            .iter()
            .filter(|id| fw.kind_of(id) == Ok(ArgumentKind::Decision))
            .count();
        if count != 1 {
            return Err(DecisionError::Inconsistent {
                decision: set.decision.clone(),
                count,
            });
        }
    }
    report.exclusive_alternatives = true;
    Ok(report)
}
