//! Framework file formats.
//!
//! Text format, one fact per line:
//!
//! ```text
//! % comment
//! arg(A).
//! kind(A,decision).
//! att(B,A).
//! ```
//!
//! An argument without a `kind` line, or with a kind other than `decision`
//! or `belief`, is read as a belief and a warning is recorded.
//!
//! Structured format (JSON):
//!
//! ```json
//! { "arguments": [ { "id": "A", "kind": "decision", "premises": [],
//!                    "conclusion": "...", "scheme_id": null, "bindings": {} } ],
//!   "attacks": [ ["B", "A"] ] }
//! ```
//!
//! Both readers keep whatever edges the file lists; rule checking is left to
//! [`ArgumentationFramework::validate`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Argument, ArgumentId, ArgumentKind, ArgumentationFramework, Attack};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("argument `{0}` listed twice")]
    Duplicate(ArgumentId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self::Syntax {
            line,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        Self::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameworkFormat {
    Text,
    Json,
}

impl FrameworkFormat {
    /// `.json` selects the structured format; anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Text,
        }
    }
}

/// A parsed framework plus non-fatal notes from the reader.
#[derive(Debug)]
pub struct Loaded {
    pub framework: ArgumentationFramework,
    pub warnings: Vec<String>,
}

pub fn read_path(path: &Path, format: Option<FrameworkFormat>) -> Result<Loaded, FormatError> {
    let source = std::fs::read_to_string(path)?;
    match format.unwrap_or_else(|| FrameworkFormat::from_path(path)) {
        FrameworkFormat::Text => parse_text(&source),
        FrameworkFormat::Json => Ok(Loaded {
            framework: from_json(&source)?,
            warnings: Vec::new(),
        }),
    }
}

pub fn parse_text(source: &str) -> Result<Loaded, FormatError> {
    let mut order: Vec<ArgumentId> = Vec::new();
    let mut kinds: BTreeMap<ArgumentId, Option<ArgumentKind>> = BTreeMap::new();
    let mut attacks = BTreeSet::new();
    let mut warnings = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('%') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_suffix('.')
            .ok_or_else(|| FormatError::syntax(line_no, "expected terminating `.`"))?;
        let open = body
            .find('(')
            .ok_or_else(|| FormatError::syntax(line_no, "expected `(`"))?;
        let inner = body[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| FormatError::syntax(line_no, "expected `)` before `.`"))?;
        let functor = body[..open].trim();
        let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
        for field in &fields {
            if !is_token(field) {
                return Err(FormatError::syntax(line_no, format!("invalid token `{field}`")));
            }
        }
        match (functor, fields.as_slice()) {
            ("arg", [id]) => {
                let id = ArgumentId::from(*id);
                if kinds.contains_key(&id) {
                    return Err(FormatError::syntax(line_no, format!("argument `{id}` declared twice")));
                }
                kinds.insert(id.clone(), None);
                order.push(id);
            }
            ("att", [from, to]) => {
                attacks.insert(Attack::new(*from, *to));
            }
            ("kind", [id, kind]) => {
                let id = ArgumentId::from(*id);
                let slot = kinds.get_mut(&id).ok_or_else(|| {
                    FormatError::syntax(line_no, format!("kind given for undeclared argument `{id}`"))
                })?;
                if slot.is_some() {
                    return Err(FormatError::syntax(line_no, format!("kind of `{id}` given twice")));
                }
                *slot = Some(match *kind {
                    "decision" => ArgumentKind::Decision,
                    "belief" => ArgumentKind::Belief,
                    other => {
                        warnings.push(format!(
                            "line {line_no}: unknown kind `{other}` for `{id}`, reading as belief"
                        ));
                        ArgumentKind::Belief
                    }
                });
            }
            ("arg" | "att" | "kind", _) => {
                return Err(FormatError::syntax(
                    line_no,
                    format!("wrong number of fields for `{functor}`"),
                ));
            }
            _ => {
                return Err(FormatError::syntax(line_no, format!("unknown fact `{functor}`")));
            }
        }
    }

    let arguments = order.into_iter().map(|id| {
        let kind = kinds[&id].unwrap_or_else(|| {
            warnings.push(format!("no kind given for `{id}`, reading as belief"));
            ArgumentKind::Belief
        });
        Argument::bare(id, kind)
    });
    let arguments: Vec<Argument> = arguments.collect();
    Ok(Loaded {
        framework: ArgumentationFramework::from_parts_unchecked(arguments, attacks),
        warnings,
    })
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\''))
}

pub fn to_text(fw: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for arg in fw.arguments() {
        let _ = writeln!(out, "arg({}).", arg.id);
    }
    for arg in fw.arguments() {
        let _ = writeln!(out, "kind({},{}).", arg.id, arg.kind);
    }
    for att in fw.attacks() {
        let _ = writeln!(out, "att({},{}).", att.from, att.to);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Document {
    arguments: Vec<Argument>,
    #[serde(default)]
    attacks: Vec<(ArgumentId, ArgumentId)>,
}

pub fn from_json(source: &str) -> Result<ArgumentationFramework, FormatError> {
    let doc: Document = serde_json::from_str(source)?;
    let mut seen = BTreeSet::new();
    let mut arguments = Vec::with_capacity(doc.arguments.len());
    for mut arg in doc.arguments {
        if !seen.insert(arg.id.clone()) {
            return Err(FormatError::Duplicate(arg.id));
        }
        if arg.conclusion.is_empty() {
            arg.conclusion = arg.id.as_str().to_owned();
        }
        arguments.push(arg);
    }
    Ok(ArgumentationFramework::from_parts_unchecked(
        arguments,
        doc.attacks.into_iter().map(|(from, to)| Attack { from, to }),
    ))
}

pub fn to_json(fw: &ArgumentationFramework) -> String {
    let doc = Document {
        arguments: fw.arguments().cloned().collect(),
        attacks: fw
            .attacks()
            .map(|a| (a.from.clone(), a.to.clone()))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("framework serializes")
}
