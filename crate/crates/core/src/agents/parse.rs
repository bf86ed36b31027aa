//! Extraction of protocol replies from free-text completions.
//!
//! Backends are asked to answer with one fenced block holding a JSON object
//! whose `type` is `argument`, `verdict` or `done`. Text outside the block is
//! ignored; the first block that parses as such an object wins.

use serde::Deserialize;

use crate::aaf::ArgumentId;
use crate::schemes::Binding;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedResponse {
    NewArgument {
        scheme_id: String,
        bindings: Binding,
        attacks_target: Option<ArgumentId>,
    },
    CqVerdict {
        /// Absent when the backend did not echo the question id.
        cq_id: Option<String>,
        rejected: bool,
        reason: String,
    },
    /// The generator has nothing further to propose.
    Done,
    Unparseable {
        raw_text: String,
        diagnostic: String,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum Envelope {
    Argument {
        scheme: String,
        #[serde(default)]
        bindings: Binding,
        #[serde(default)]
        attacks: Option<String>,
    },
    Verdict {
        #[serde(default)]
        cq: Option<String>,
        rejected: bool,
        #[serde(default)]
        reason: String,
    },
    Done,
}

/// Contents of every fenced block, in order.
fn fenced_blocks(raw: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in raw.lines() {
        let fence = line.trim_start().starts_with("```");
        match (&mut current, fence) {
            (None, true) => current = Some(Vec::new()),
            (Some(lines), true) => {
                blocks.push(lines.join("\n"));
                current = None;
            }
            (Some(lines), false) => lines.push(line),
            (None, false) => {}
        }
    }
    blocks
}

pub fn parse_response(raw: &str) -> ParsedResponse {
    let blocks = fenced_blocks(raw);
    if blocks.is_empty() {
        return ParsedResponse::Unparseable {
            raw_text: raw.to_owned(),
            diagnostic: "no fenced ```json block found".into(),
        };
    }
    let mut last_error = String::new();
    for block in blocks {
        match serde_json::from_str::<Envelope>(&block) {
            Ok(envelope) => return convert(envelope),
            Err(e) => last_error = e.to_string(),
        }
    }
    ParsedResponse::Unparseable {
        raw_text: raw.to_owned(),
        diagnostic: format!("fenced block is not a valid reply object: {last_error}"),
    }
}

fn convert(envelope: Envelope) -> ParsedResponse {
    match envelope {
        Envelope::Argument {
            scheme,
            bindings,
            attacks,
        } => ParsedResponse::NewArgument {
            scheme_id: scheme,
            bindings,
            attacks_target: attacks
                .filter(|a| !a.trim().is_empty() && a != "null")
                .map(ArgumentId::from),
        },
        Envelope::Verdict { cq, rejected, reason } => ParsedResponse::CqVerdict {
            cq_id: cq,
            rejected,
            reason,
        },
        Envelope::Done => ParsedResponse::Done,
    }
}
