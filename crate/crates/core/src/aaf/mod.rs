//! Typed abstract argumentation frameworks.
//!
//! Arguments are split into decision arguments and belief arguments. Two
//! structural rules hold for every well-formed framework:
//!
//! * distinct decision arguments attack each other in both directions;
//! * no decision argument attacks a belief argument.
//!
//! [`ArgumentationFramework::add_argument`] inserts the decision mutual attacks
//! itself and [`ArgumentationFramework::add_attack`] refuses decision-to-belief
//! edges, so frameworks built through the mutators are well-formed by
//! construction. Frameworks loaded from files are taken as-is and checked
//! with [`ArgumentationFramework::validate`].

pub mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of an argument, unique within one framework.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(value: impl Into<String>) -> Self {
        Self(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArgumentId {
    fn from(value: &str) -> Self {
        Self(value.to_owned())
    }
}

impl From<String> for ArgumentId {
    fn from(value: String) -> Self {
        Self(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgumentKind {
    Decision,
    Belief,
}

impl fmt::Display for ArgumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgumentKind::Decision => f.write_str("decision"),
            ArgumentKind::Belief => f.write_str("belief"),
        }
    }
}

/// A node of the framework: an instantiated scheme (or a bare labelled node).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub id: ArgumentId,
    pub kind: ArgumentKind,
    #[serde(default)]
    pub premises: Vec<String>,
    #[serde(default)]
    pub conclusion: String,
    #[serde(default)]
    pub scheme_id: Option<String>,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
}

impl Argument {
    /// An argument with no scheme content. The conclusion is the id itself.
    pub fn bare(id: impl Into<ArgumentId>, kind: ArgumentKind) -> Self {
        let id = id.into();
        Self {
            conclusion: id.as_str().to_owned(),
            id,
            kind,
            premises: Vec::new(),
            scheme_id: None,
            bindings: BTreeMap::new(),
        }
    }

    pub fn decision(id: impl Into<ArgumentId>) -> Self {
        Self::bare(id, ArgumentKind::Decision)
    }

    pub fn belief(id: impl Into<ArgumentId>) -> Self {
        Self::bare(id, ArgumentKind::Belief)
    }

    pub fn with_conclusion(mut self, conclusion: impl Into<String>) -> Self {
        self.conclusion = conclusion.into();
        self
    }

    pub fn is_decision(&self) -> bool {
        self.kind == ArgumentKind::Decision
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attack {
    pub from: ArgumentId,
    pub to: ArgumentId,
}

impl Attack {
    pub fn new(from: impl Into<ArgumentId>, to: impl Into<ArgumentId>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("argument `{0}` is already registered")]
    DuplicateId(ArgumentId),
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgumentId),
    #[error("decision argument `{from}` may not attack belief argument `{to}`")]
    ForbiddenAttack { from: ArgumentId, to: ArgumentId },
    #[error("invalid argument `{id}`: {reason}")]
    InvalidArgument { id: ArgumentId, reason: String },
}

/// A broken structural rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    /// Decision `from` lacks its attack on decision `to`.
    MissingMutualAttack { from: ArgumentId, to: ArgumentId },
    ForbiddenAttack { from: ArgumentId, to: ArgumentId },
    DanglingEndpoint { from: ArgumentId, to: ArgumentId, missing: ArgumentId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingMutualAttack { from, to } => {
                write!(f, "missing mutual attack: decision {from} does not attack decision {to}")
            }
            Violation::ForbiddenAttack { from, to } => {
                write!(f, "forbidden attack: decision {from} attacks belief {to}")
            }
            Violation::DanglingEndpoint { from, to, missing } => {
                write!(f, "dangling endpoint: attack ({from},{to}) names unregistered {missing}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    SelfAttack { id: ArgumentId },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SelfAttack { id } => write!(f, "self-attack: {id} attacks itself"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Arguments plus a binary attack relation.
///
/// All collections are ordered by [`ArgumentId`], so every query returns
/// deterministic output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArgumentationFramework {
    arguments: BTreeMap<ArgumentId, Argument>,
    attacks: BTreeSet<Attack>,
}

impl ArgumentationFramework {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a framework without enforcing any rule. Used by the file
    /// readers; call [`validate`](Self::validate) on the result.
    pub fn from_parts_unchecked(
        arguments: impl IntoIterator<Item = Argument>,
        attacks: impl IntoIterator<Item = Attack>,
    ) -> Self {
        Self {
            arguments: arguments.into_iter().map(|a| (a.id.clone(), a)).collect(),
            attacks: attacks.into_iter().collect(),
        }
    }

    /// Registers an argument. A decision argument gets mutual attacks with
    /// every decision already present.
    pub fn add_argument(&mut self, arg: Argument) -> Result<ArgumentId, FrameworkError> {
        if arg.id.as_str().trim().is_empty() {
            return Err(FrameworkError::InvalidArgument {
                id: arg.id,
                reason: "empty id".into(),
            });
        }
        if arg.conclusion.trim().is_empty() {
            return Err(FrameworkError::InvalidArgument {
                id: arg.id,
                reason: "empty conclusion".into(),
            });
        }
        if self.arguments.contains_key(&arg.id) {
            return Err(FrameworkError::DuplicateId(arg.id));
        }
        let id = arg.id.clone();
        if arg.is_decision() {
            let others: Vec<ArgumentId> = self
                .arguments
                .values()
                .filter(|a| a.is_decision())
                .map(|a| a.id.clone())
                .collect();
            for other in others {
                self.attacks.insert(Attack::new(id.clone(), other.clone()));
                self.attacks.insert(Attack::new(other, id.clone()));
            }
        }
        self.arguments.insert(id.clone(), arg);
        Ok(id)
    }

    /// Inserts `(from, to)`. Repeats are no-ops.
    pub fn add_attack(
        &mut self,
        from: impl Into<ArgumentId>,
        to: impl Into<ArgumentId>,
    ) -> Result<(), FrameworkError> {
        let (from, to) = (from.into(), to.into());
        let from_kind = self.kind_of(&from)?;
        let to_kind = self.kind_of(&to)?;
        if from_kind == ArgumentKind::Decision && to_kind == ArgumentKind::Belief {
            return Err(FrameworkError::ForbiddenAttack { from, to });
        }
        self.attacks.insert(Attack { from, to });
        Ok(())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for attack in &self.attacks {
            let from = self.arguments.get(&attack.from);
            let to = self.arguments.get(&attack.to);
            match (from, to) {
                (None, _) => report.violations.push(Violation::DanglingEndpoint {
                    from: attack.from.clone(),
                    to: attack.to.clone(),
                    missing: attack.from.clone(),
                }),
                (_, None) => report.violations.push(Violation::DanglingEndpoint {
                    from: attack.from.clone(),
                    to: attack.to.clone(),
                    missing: attack.to.clone(),
                }),
                (Some(f), Some(t)) => {
                    if f.kind == ArgumentKind::Decision && t.kind == ArgumentKind::Belief {
                        report.violations.push(Violation::ForbiddenAttack {
                            from: attack.from.clone(),
                            to: attack.to.clone(),
                        });
                    }
                    if attack.from == attack.to {
                        report.warnings.push(Warning::SelfAttack {
                            id: attack.from.clone(),
                        });
                    }
                }
            }
        }
        let decisions: Vec<&ArgumentId> = self.decisions().collect();
        for a in &decisions {
            for b in &decisions {
                if a != b && !self.has_attack(a, b) {
                    report.violations.push(Violation::MissingMutualAttack {
                        from: (*a).clone(),
                        to: (*b).clone(),
                    });
                }
            }
        }
        report.violations.sort();
        report.warnings.sort();
        report
    }

    /// Every `x` with `(x, id)` in the attack relation, sorted.
    pub fn attackers(&self, id: &ArgumentId) -> Result<Vec<ArgumentId>, FrameworkError> {
        self.require(id)?;
        Ok(self
            .attacks
            .iter()
            .filter(|a| &a.to == id)
            .map(|a| a.from.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect())
    }

    /// Every `y` with `(id, y)` in the attack relation, sorted.
    pub fn targets(&self, id: &ArgumentId) -> Result<Vec<ArgumentId>, FrameworkError> {
        self.require(id)?;
        Ok(self
            .attacks
            .range(Attack::new(id.clone(), "")..)
            .take_while(|a| &a.from == id)
            .map(|a| a.to.clone())
            .collect())
    }

    pub fn has_attack(&self, from: &ArgumentId, to: &ArgumentId) -> bool {
        self.attacks.contains(&Attack {
            from: from.clone(),
            to: to.clone(),
        })
    }

    pub fn get(&self, id: &ArgumentId) -> Option<&Argument> {
        self.arguments.get(id)
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.arguments.contains_key(id)
    }

    pub fn kind_of(&self, id: &ArgumentId) -> Result<ArgumentKind, FrameworkError> {
        self.arguments
            .get(id)
            .map(|a| a.kind)
            .ok_or_else(|| FrameworkError::UnknownArgument(id.clone()))
    }

    pub(crate) fn require(&self, id: &ArgumentId) -> Result<(), FrameworkError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(FrameworkError::UnknownArgument(id.clone()))
        }
    }

    pub fn arguments(&self) -> impl ExactSizeIterator<Item = &Argument> {
        self.arguments.values()
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = &ArgumentId> {
        self.arguments.keys()
    }

    pub fn attacks(&self) -> impl ExactSizeIterator<Item = &Attack> {
        self.attacks.iter()
    }

    pub fn decisions(&self) -> impl Iterator<Item = &ArgumentId> {
        self.arguments
            .values()
            .filter(|a| a.is_decision())
            .map(|a| &a.id)
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn attack_count(&self) -> usize {
        self.attacks.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<ArgumentId> {
        names.iter().map(|n| ArgumentId::from(*n)).collect()
    }

    /// Decisions A, B, C; beliefs D, E each attacking A.
    fn migraine_example() -> ArgumentationFramework {
        let mut fw = ArgumentationFramework::new();
        for d in ["A", "B", "C"] {
            fw.add_argument(Argument::decision(d)).unwrap();
        }
        for b in ["D", "E"] {
            fw.add_argument(Argument::belief(b)).unwrap();
            fw.add_attack(b, "A").unwrap();
        }
        fw
    }

    #[test]
    fn new_framework_is_empty_and_valid() {
        let mut fw = ArgumentationFramework::new();
        assert_eq!((fw.len(), fw.attack_count()), (0, 0));
        assert!(fw.validate().is_valid());
        fw.add_argument(Argument::belief("X")).unwrap();
        assert_eq!(fw.len(), 1);
    }

    #[test]
    fn decisions_gain_mutual_attacks() {
        let mut fw = ArgumentationFramework::new();
        fw.add_argument(Argument::decision("A")).unwrap();
        fw.add_argument(Argument::decision("B")).unwrap();
        let attacks: Vec<_> = fw.attacks().cloned().collect();
        assert_eq!(attacks, vec![Attack::new("A", "B"), Attack::new("B", "A")]);
        assert_eq!(fw.attackers(&"B".into()).unwrap(), ids(&["A"]));
    }

    #[test]
    fn beliefs_add_no_attacks() {
        let mut fw = ArgumentationFramework::new();
        fw.add_argument(Argument::decision("A")).unwrap();
        fw.add_argument(Argument::belief("D")).unwrap();
        assert_eq!(fw.attack_count(), 0);
    }

    #[test]
    fn duplicate_and_empty_ids_rejected() {
        let mut fw = ArgumentationFramework::new();
        fw.add_argument(Argument::decision("A")).unwrap();
        assert_eq!(
            fw.add_argument(Argument::belief("A")),
            Err(FrameworkError::DuplicateId("A".into()))
        );
        assert!(matches!(
            fw.add_argument(Argument::belief("")),
            Err(FrameworkError::InvalidArgument { .. })
        ));
        assert!(matches!(
            fw.add_argument(Argument::belief("Q").with_conclusion(" ")),
            Err(FrameworkError::InvalidArgument { .. })
        ));
    }

    #[test]
    fn attack_typing_rules() {
        let mut fw = ArgumentationFramework::new();
        fw.add_argument(Argument::decision("A")).unwrap();
        fw.add_argument(Argument::belief("D")).unwrap();
        fw.add_argument(Argument::belief("F")).unwrap();
        assert!(fw.add_attack("D", "A").is_ok());
        assert!(fw.add_attack("D", "A").is_ok());
        assert_eq!(fw.attack_count(), 1);
        assert_eq!(
            fw.add_attack("A", "D"),
            Err(FrameworkError::ForbiddenAttack {
                from: "A".into(),
                to: "D".into()
            })
        );
        assert_eq!(
            fw.add_attack("X", "A"),
            Err(FrameworkError::UnknownArgument("X".into()))
        );
        // belief on belief is allowed
        assert!(fw.add_attack("F", "D").is_ok());
        assert!(fw.validate().is_valid());
    }

    #[test]
    fn migraine_example_is_valid_and_a_has_four_attackers() {
        let fw = migraine_example();
        assert!(fw.validate().is_valid());
        assert_eq!(fw.attackers(&"A".into()).unwrap(), ids(&["B", "C", "D", "E"]));
        assert_eq!(fw.attackers(&"D".into()).unwrap(), Vec::<ArgumentId>::new());
        assert_eq!(fw.targets(&"A".into()).unwrap(), ids(&["B", "C"]));
        assert!(fw.attackers(&"Z".into()).is_err());
    }

    #[test]
    fn validate_reports_each_violation_kind() {
        let fw = ArgumentationFramework::from_parts_unchecked(
            [Argument::decision("A"), Argument::decision("B"), Argument::belief("D")],
            [Attack::new("A", "B"), Attack::new("A", "D"), Attack::new("Z", "A")],
        );
        let report = fw.validate();
        assert_eq!(
            report.violations,
            vec![
                Violation::MissingMutualAttack {
                    from: "B".into(),
                    to: "A".into()
                },
                Violation::ForbiddenAttack {
                    from: "A".into(),
                    to: "D".into()
                },
                Violation::DanglingEndpoint {
                    from: "Z".into(),
                    to: "A".into(),
                    missing: "Z".into()
                },
            ]
        );
    }

    #[test]
    fn self_attack_is_a_warning_only() {
        let mut fw = ArgumentationFramework::new();
        fw.add_argument(Argument::belief("S")).unwrap();
        fw.add_attack("S", "S").unwrap();
        let report = fw.validate();
        assert!(report.is_valid());
        assert_eq!(report.warnings, vec![Warning::SelfAttack { id: "S".into() }]);
    }
}
