//! Human-readable output.

use std::fmt::Write as _;

use clinarg::aaf::ArgumentationFramework;
use clinarg::decision::DecisionReport;
use clinarg::dialogue::{DialogueTranscript, Status};
use clinarg::schemes::SchemeRegistry;
use clinarg::semantics::Extension;

pub fn extensions(exts: &[Extension]) -> String {
    let inner: Vec<String> = exts.iter().map(ToString::to_string).collect();
    format!("[{}]", inner.join(", "))
}

pub fn report(fw: &ArgumentationFramework, report: &DecisionReport) -> String {
    let mut out = String::new();
    let ids: Vec<&str> = report.optional_decisions.iter().map(|d| d.as_str()).collect();
    let _ = writeln!(
        out,
        "optional decisions: {}",
        if ids.is_empty() { "none".to_owned() } else { ids.join(", ") }
    );
    for d in &report.optional_decisions {
        if let Some(arg) = fw.get(d) {
            if arg.conclusion != d.as_str() {
                let _ = writeln!(out, "  {d}: {}", arg.conclusion);
            }
        }
    }
    let _ = writeln!(out, "explanation sets:");
    if report.explanation_sets.is_empty() {
        let _ = writeln!(out, "  none");
    }
    for set in &report.explanation_sets {
        let members = Extension::new(set.full_set());
        let _ = writeln!(out, "  {}: {members}", set.decision);
    }
    let _ = writeln!(out, "error flag: {}", report.error_flag);
    if let Some(note) = &report.error_note {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

pub fn status(t: &DialogueTranscript) -> String {
    match t.status {
        Status::Active => "active".into(),
        Status::Terminated(reason) => format!("terminated ({reason})"),
    }
}

pub fn schemes(registry: &SchemeRegistry) -> String {
    let mut out = String::new();
    for s in registry.schemes() {
        let _ = writeln!(out, "{} ({}): {}", s.id, s.produces_kind, s.name);
        let _ = writeln!(out, "  variables: {}", s.variables.join(", "));
        for p in &s.premise_templates {
            let _ = writeln!(out, "  premise: {p}");
        }
        let _ = writeln!(out, "  conclusion: {}", s.conclusion_template);
        for q in registry.questions_of(&s.id) {
            let counter = q
                .on_reject_scheme
                .as_deref()
                .map(|c| format!(" -> {c}"))
                .unwrap_or_default();
            let _ = writeln!(out, "  cq {}{counter}: {}", q.id, q.text_template);
        }
    }
    out
}
