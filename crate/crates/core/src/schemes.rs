//! Argumentation schemes and their critical questions.
//!
//! A scheme is a premise/conclusion template pair over a declared set of
//! variables. Instantiating it with a binding yields an [`Argument`] of the
//! scheme's kind. Each critical question may name the scheme a rejection
//! should be answered with.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aaf::{Argument, ArgumentId, ArgumentKind};
use crate::template::Template;

/// Variable name to concrete text.
pub type Binding = BTreeMap<String, String>;

const BUILTIN_PACK: &str = include_str!("../data/schemes.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("scheme `{0}` is already registered")]
    DuplicateScheme(String),
    #[error("critical question `{0}` is already registered")]
    DuplicateQuestion(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("malformed template in `{owner}`: {reason}")]
    MalformedTemplate { owner: String, reason: String },
    #[error("binding for `{scheme}` lacks {missing:?}")]
    IncompleteBinding { scheme: String, missing: Vec<String> },
    #[error("scheme pack: {0}")]
    Pack(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub premise_templates: Vec<String>,
    pub conclusion_template: String,
    pub variables: Vec<String>,
    pub produces_kind: ArgumentKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalQuestion {
    pub id: String,
    pub scheme_id: String,
    pub text_template: String,
    #[serde(default)]
    pub on_reject_scheme: Option<String>,
}

/// A critical question rendered against a binding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosedQuestion {
    pub id: String,
    pub text: String,
    pub on_reject_scheme: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SchemePack {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub critical_questions: Vec<CriticalQuestion>,
}

#[derive(Clone, Debug, Default)]
pub struct SchemeRegistry {
    schemes: Vec<Scheme>,
    questions: Vec<CriticalQuestion>,
}

fn check_template(
    owner: &str,
    source: &str,
    variables: &[String],
) -> Result<Template, SchemeError> {
    let malformed = |reason: String| SchemeError::MalformedTemplate {
        owner: owner.to_owned(),
        reason,
    };
    let t = Template::parse(source).map_err(|e| malformed(e.to_string()))?;
    if let Some(p) = t.placeholders().find(|p| !variables.iter().any(|v| v == p)) {
        return Err(malformed(format!("placeholder `{{{p}}}` is not a declared variable")));
    }
    Ok(t)
}

fn render(t: &Template, binding: &Binding) -> String {
    t.render(binding)
        .expect("placeholders were checked against the binding")
}

impl SchemeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_scheme(&mut self, scheme: Scheme) -> Result<(), SchemeError> {
        if self.scheme(&scheme.id).is_some() {
            return Err(SchemeError::DuplicateScheme(scheme.id));
        }
        if scheme.premise_templates.is_empty() {
            return Err(SchemeError::MalformedTemplate {
                owner: scheme.id,
                reason: "no premise templates".into(),
            });
        }
        if scheme.conclusion_template.trim().is_empty() {
            return Err(SchemeError::MalformedTemplate {
                owner: scheme.id,
                reason: "empty conclusion template".into(),
            });
        }
        for source in scheme
            .premise_templates
            .iter()
            .chain(std::iter::once(&scheme.conclusion_template))
        {
            check_template(&scheme.id, source, &scheme.variables)?;
        }
        self.schemes.push(scheme);
        Ok(())
    }

    pub fn register_question(&mut self, cq: CriticalQuestion) -> Result<(), SchemeError> {
        if self.questions.iter().any(|q| q.id == cq.id) {
            return Err(SchemeError::DuplicateQuestion(cq.id));
        }
        let scheme = self
            .scheme(&cq.scheme_id)
            .ok_or_else(|| SchemeError::UnknownScheme(cq.scheme_id.clone()))?;
        check_template(&cq.id, &cq.text_template, &scheme.variables)?;
        if let Some(target) = &cq.on_reject_scheme {
            if self.scheme(target).is_none() {
                return Err(SchemeError::UnknownScheme(target.clone()));
            }
        }
        self.questions.push(cq);
        Ok(())
    }

    pub fn from_pack(pack: SchemePack) -> Result<Self, SchemeError> {
        let mut registry = Self::new();
        for s in pack.schemes {
            registry.register_scheme(s)?;
        }
        for q in pack.critical_questions {
            registry.register_question(q)?;
        }
        Ok(registry)
    }

    pub fn from_json(source: &str) -> Result<Self, SchemeError> {
        let pack: SchemePack =
            serde_json::from_str(source).map_err(|e| SchemeError::Pack(e.to_string()))?;
        Self::from_pack(pack)
    }

    pub fn load(path: &Path) -> Result<Self, SchemeError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| SchemeError::Pack(format!("{}: {e}", path.display())))?;
        Self::from_json(&source)
    }

    pub fn to_pack(&self) -> SchemePack {
        SchemePack {
            description: String::new(),
            schemes: self.schemes.clone(),
            critical_questions: self.questions.clone(),
        }
    }

    pub fn scheme(&self, id: &str) -> Option<&Scheme> {
        self.schemes.iter().find(|s| s.id == id)
    }

    pub fn schemes(&self) -> impl Iterator<Item = &Scheme> {
        self.schemes.iter()
    }

    /// Critical questions of a scheme in registration order.
    pub fn questions_of<'a>(&'a self, scheme_id: &'a str) -> impl Iterator<Item = &'a CriticalQuestion> {
        self.questions.iter().filter(move |q| q.scheme_id == scheme_id)
    }

    pub fn question(&self, id: &str) -> Option<&CriticalQuestion> {
        self.questions.iter().find(|q| q.id == id)
    }

    fn require(&self, scheme_id: &str) -> Result<&Scheme, SchemeError> {
        self.scheme(scheme_id)
            .ok_or_else(|| SchemeError::UnknownScheme(scheme_id.to_owned()))
    }

    /// Restricts `binding` to the scheme's variables, failing when any is
    /// absent or blank.
    pub fn complete_binding(&self, scheme_id: &str, binding: &Binding) -> Result<Binding, SchemeError> {
        let scheme = self.require(scheme_id)?;
        let missing: Vec<String> = scheme
            .variables
            .iter()
            .filter(|v| binding.get(*v).is_none_or(|value| value.trim().is_empty()))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(SchemeError::IncompleteBinding {
                scheme: scheme_id.to_owned(),
                missing,
            });
        }
        Ok(scheme
            .variables
            .iter()
            .map(|v| (v.clone(), binding[v].clone()))
            .collect())
    }

    pub fn instantiate(
        &self,
        scheme_id: &str,
        binding: &Binding,
        arg_id: impl Into<ArgumentId>,
    ) -> Result<Argument, SchemeError> {
        let binding = self.complete_binding(scheme_id, binding)?;
        let scheme = self.require(scheme_id)?;
        let parse = |s: &str| check_template(&scheme.id, s, &scheme.variables);
        let premises = scheme
            .premise_templates
            .iter()
            .map(|p| Ok(render(&parse(p)?, &binding)))
            .collect::<Result<Vec<_>, SchemeError>>()?;
        let conclusion = render(&parse(&scheme.conclusion_template)?, &binding);
        Ok(Argument {
            id: arg_id.into(),
            kind: scheme.produces_kind,
            premises,
            conclusion,
            scheme_id: Some(scheme.id.clone()),
            bindings: binding,
        })
    }

    pub fn critical_questions_for(
        &self,
        scheme_id: &str,
        binding: &Binding,
    ) -> Result<Vec<PosedQuestion>, SchemeError> {
        let binding = self.complete_binding(scheme_id, binding)?;
        let scheme = self.require(scheme_id)?;
        self.questions_of(scheme_id)
            .map(|q| {
                let t = check_template(&q.id, &q.text_template, &scheme.variables)?;
                Ok(PosedQuestion {
                    id: q.id.clone(),
                    text: render(&t, &binding),
                    on_reject_scheme: q.on_reject_scheme.clone(),
                })
            })
            .collect()
    }
}

/// Registry holding the shipped ASDM, ASSE and ASDA schemes.
pub fn builtin_schemes() -> SchemeRegistry {
    SchemeRegistry::from_json(BUILTIN_PACK).expect("builtin scheme pack is well-formed")
}

/// The shipped pack, verbatim.
pub fn builtin_pack_json() -> &'static str {
    BUILTIN_PACK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binding(pairs: &[(&str, &str)]) -> Binding {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn toy(id: &str, template: &str) -> Scheme {
        Scheme {
            id: id.into(),
            name: String::new(),
            premise_templates: vec![template.into()],
            conclusion_template: "{x} holds.".into(),
            variables: vec!["x".into()],
            produces_kind: ArgumentKind::Belief,
        }
    }

    #[test]
    fn builtin_pack_contents() {
        let reg = builtin_schemes();
        let ids: Vec<&str> = reg.schemes().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, vec!["ASDM", "ASSE", "ASDA"]);
        assert_eq!(reg.scheme("ASDM").unwrap().produces_kind, ArgumentKind::Decision);
        assert_eq!(reg.scheme("ASSE").unwrap().produces_kind, ArgumentKind::Belief);
        assert_eq!(reg.scheme("ASDA").unwrap().produces_kind, ArgumentKind::Belief);
        let side_effect = reg.question("ASDM.side_effects").unwrap();
        assert_eq!(side_effect.on_reject_scheme.as_deref(), Some("ASSE"));
    }

    #[test]
    fn register_rules() {
        let mut reg = SchemeRegistry::new();
        reg.register_scheme(toy("T", "{x} is observed.")).unwrap();
        assert!(reg.scheme("T").is_some());
        assert_eq!(
            reg.register_scheme(toy("T", "{x}")),
            Err(SchemeError::DuplicateScheme("T".into()))
        );
        assert!(matches!(
            reg.register_scheme(toy("U", "{y} is observed.")),
            Err(SchemeError::MalformedTemplate { .. })
        ));
        let mut empty = toy("V", "{x}");
        empty.premise_templates.clear();
        assert!(matches!(
            reg.register_scheme(empty),
            Err(SchemeError::MalformedTemplate { .. })
        ));
        let cq = CriticalQuestion {
            id: "T.q".into(),
            scheme_id: "T".into(),
            text_template: "Really {z}?".into(),
            on_reject_scheme: None,
        };
        assert!(matches!(
            reg.register_question(cq),
            Err(SchemeError::MalformedTemplate { .. })
        ));
        let dangling = CriticalQuestion {
            id: "T.r".into(),
            scheme_id: "T".into(),
            text_template: "Really {x}?".into(),
            on_reject_scheme: Some("NOPE".into()),
        };
        assert_eq!(
            reg.register_question(dangling),
            Err(SchemeError::UnknownScheme("NOPE".into()))
        );
    }

    #[test]
    fn instantiate_decision() {
        let reg = builtin_schemes();
        let b = binding(&[("treatment", "Propranolol"), ("condition", "migraine prophylaxis")]);
        let arg = reg.instantiate("ASDM", &b, "B").unwrap();
        assert_eq!(arg.kind, ArgumentKind::Decision);
        assert_eq!(arg.conclusion, "Propranolol should be adopted.");
        assert_eq!(
            arg.premises[2],
            "Administering Propranolol promotes that goal in this situation."
        );
        assert_eq!(arg.scheme_id.as_deref(), Some("ASDM"));
        assert_eq!(arg.bindings, b);
    }

    #[test]
    fn instantiate_side_effect_belief() {
        let reg = builtin_schemes();
        let b = binding(&[("treatment", "Paroxetine"), ("side_effect", "sexual dysfunction")]);
        let arg = reg.instantiate("ASSE", &b, "B").unwrap();
        assert_eq!(arg.kind, ArgumentKind::Belief);
        assert!(arg.conclusion.contains("Paroxetine"));
    }

    #[test]
    fn incomplete_binding_and_unknown_scheme() {
        let reg = builtin_schemes();
        let err = reg
            .instantiate("ASDM", &binding(&[("treatment", "X")]), "A")
            .unwrap_err();
        assert_eq!(
            err,
            SchemeError::IncompleteBinding {
                scheme: "ASDM".into(),
                missing: vec!["condition".into()]
            }
        );
        let blank = binding(&[("treatment", "X"), ("condition", "  ")]);
        assert!(reg.instantiate("ASDM", &blank, "A").is_err());
        assert_eq!(
            reg.critical_questions_for("NOPE", &Binding::new()),
            Err(SchemeError::UnknownScheme("NOPE".into()))
        );
    }

    #[test]
    fn extra_binding_keys_are_dropped() {
        let reg = builtin_schemes();
        let b = binding(&[("treatment", "X"), ("condition", "Y"), ("mood", "Z")]);
        let arg = reg.instantiate("ASDM", &b, "A").unwrap();
        assert!(!arg.bindings.contains_key("mood"));
    }

    #[test]
    fn critical_questions_mention_the_treatment() {
        let reg = builtin_schemes();
        let b = binding(&[("treatment", "Propranolol"), ("condition", "migraine")]);
        let qs = reg.critical_questions_for("ASDM", &b).unwrap();
        assert_eq!(qs.len(), 4);
        assert!(qs.iter().all(|q| q.text.contains("Propranolol")));
        assert_eq!(qs[1].id, "ASDM.side_effects");
    }

    #[test]
    fn scheme_without_questions() {
        let mut reg = SchemeRegistry::new();
        reg.register_scheme(toy("T", "{x}")).unwrap();
        let qs = reg
            .critical_questions_for("T", &binding(&[("x", "1")]))
            .unwrap();
        assert!(qs.is_empty());
    }
}
