//! Graphviz rendering of a framework.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::aaf::{ArgumentId, ArgumentKind, ArgumentationFramework};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotStyle {
    pub decision_color: String,
    pub belief_color: String,
    pub decision_shape: String,
    pub belief_shape: String,
}

impl Default for DotStyle {
    fn default() -> Self {
        Self {
            decision_color: "#f4a6a6".into(),
            belief_color: "#fbe7a1".into(),
            decision_shape: "box".into(),
            belief_shape: "ellipse".into(),
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders `fw` as a DOT digraph. Nodes and edges come out in id order.
/// When `move_index` is given, nodes it covers are labelled with the move
/// that introduced them.
pub fn to_dot(
    fw: &ArgumentationFramework,
    style: &DotStyle,
    move_index: Option<&BTreeMap<ArgumentId, usize>>,
) -> String {
    let mut out = String::from("digraph af {\n");
    if !fw.is_empty() {
        out.push_str("  node [style=filled];\n");
    }
    for arg in fw.arguments() {
        let (class, shape, color) = match arg.kind {
            ArgumentKind::Decision => ("decision", &style.decision_shape, &style.decision_color),
            ArgumentKind::Belief => ("belief", &style.belief_shape, &style.belief_color),
        };
        let label = match move_index.and_then(|m| m.get(&arg.id)) {
            Some(i) => format!("{} (move {i})", arg.id),
            None => arg.id.to_string(),
        };
        let _ = writeln!(
            out,
            "  {} [label={}, class={class}, shape={}, fillcolor={}, tooltip={}];",
            quote(arg.id.as_str()),
            quote(&label),
            quote(shape),
            quote(color),
            quote(&arg.conclusion),
        );
    }
    for attack in fw.attacks() {
        let _ = writeln!(out, "  {} -> {};", quote(attack.from.as_str()), quote(attack.to.as_str()));
    }
    out.push_str("}\n");
    out
}
