//! Extension semantics: conflict-freeness, defence, admissibility, and the
//! grounded, complete, stable and preferred extensions.
//!
//! Preferred extensions are found by a labelling search (see [`labelling`]);
//! [`oracle::brute_force_preferred`] is an independent subset enumeration used
//! to cross-check it.

mod labelling;
pub mod oracle;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aaf::{ArgumentId, ArgumentationFramework, FrameworkError};

pub use oracle::{brute_force_preferred, brute_force_preferred_with_cap, DEFAULT_ORACLE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error("framework has {size} arguments, oracle cap is {cap}")]
    TooLarge { size: usize, cap: usize },
}

/// A set of arguments, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Extension {
    members: BTreeSet<ArgumentId>,
}

impl Extension {
    pub fn new(members: impl IntoIterator<Item = ArgumentId>) -> Self {
        Self {
            members: members.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<ArgumentId> {
        &self.members
    }

    pub fn contains(&self, id: &ArgumentId) -> bool {
        self.members.contains(id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &Extension) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ArgumentId> {
        self.members.iter()
    }
}

impl<'a> FromIterator<&'a str> for Extension {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Self::new(iter.into_iter().map(ArgumentId::from))
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    In,
    Out,
    Undecided,
}

/// A total labelling of a framework's arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling {
    labels: std::collections::BTreeMap<ArgumentId, Label>,
}

impl Labelling {
    /// The labelling induced by an extension: members In, arguments attacked
    /// by a member Out, everything else Undecided.
    pub fn from_extension(fw: &ArgumentationFramework, ext: &Extension) -> Self {
        let labels = fw
            .ids()
            .map(|id| {
                let label = if ext.contains(id) {
                    Label::In
                } else if fw
                    .attacks()
                    .any(|a| &a.to == id && ext.contains(&a.from))
                {
                    Label::Out
                } else {
                    Label::Undecided
                };
                (id.clone(), label)
            })
            .collect();
        Self { labels }
    }

    pub fn get(&self, id: &ArgumentId) -> Option<Label> {
        self.labels.get(id).copied()
    }

    pub fn in_set(&self) -> Extension {
        Extension::new(
            self.labels
                .iter()
                .filter(|(_, l)| **l == Label::In)
                .map(|(id, _)| id.clone()),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ArgumentId, Label)> {
        self.labels.iter().map(|(id, l)| (id, *l))
    }
}

/// Dense index over a framework: argument `i` is `ids[i]`.
pub(crate) struct Graph {
    pub ids: Vec<ArgumentId>,
    pub attackers: Vec<Vec<usize>>,
    pub targets: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(fw: &ArgumentationFramework) -> Self {
        let ids: Vec<ArgumentId> = fw.ids().cloned().collect();
        let n = ids.len();
        let mut attackers = vec![Vec::new(); n];
        let mut targets = vec![Vec::new(); n];
        for att in fw.attacks() {
            // dangling edges are ignored
            let (Ok(f), Ok(t)) = (ids.binary_search(&att.from), ids.binary_search(&att.to)) else {
                continue;
            };
            attackers[t].push(f);
            targets[f].push(t);
        }
        Self {
            ids,
            attackers,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn extension(&self, members: impl IntoIterator<Item = usize>) -> Extension {
        Extension::new(members.into_iter().map(|i| self.ids[i].clone()))
    }
}

fn check_members<'a>(
    fw: &ArgumentationFramework,
    ids: impl IntoIterator<Item = &'a ArgumentId>,
) -> Result<(), FrameworkError> {
    ids.into_iter().try_for_each(|id| fw.require(id))
}

pub fn is_conflict_free(
    fw: &ArgumentationFramework,
    set: &BTreeSet<ArgumentId>,
) -> Result<bool, FrameworkError> {
    check_members(fw, set)?;
    Ok(!fw
        .attacks()
        .any(|a| set.contains(&a.from) && set.contains(&a.to)))
}

/// True iff every attacker of `arg` is attacked by some member of `set`.
pub fn defends(
    fw: &ArgumentationFramework,
    set: &BTreeSet<ArgumentId>,
    arg: &ArgumentId,
) -> Result<bool, FrameworkError> {
    check_members(fw, set)?;
    for attacker in fw.attackers(arg)? {
        if !set.iter().any(|c| fw.has_attack(c, &attacker)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_admissible(
    fw: &ArgumentationFramework,
    set: &BTreeSet<ArgumentId>,
) -> Result<bool, FrameworkError> {
    if !is_conflict_free(fw, set)? {
        return Ok(false);
    }
    for a in set {
        if !defends(fw, set, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least fixed point of the defence operator.
pub fn grounded_extension(fw: &ArgumentationFramework) -> Extension {
    let g = Graph::new(fw);
    let n = g.len();
    let mut in_set = vec![false; n];
    let mut out = vec![false; n];
    loop {
        let mut changed = false;
        for (a, attackers) in g.attackers.iter().enumerate() {
            if !in_set[a] && attackers.iter().all(|&b| out[b]) {
                in_set[a] = true;
                changed = true;
                for &t in &g.targets[a] {
                    out[t] = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    g.extension((0..n).filter(|&i| in_set[i]))
}

/// All subset-maximal admissible sets, sorted by their member lists.
pub fn preferred_extensions(fw: &ArgumentationFramework) -> Vec<Extension> {
    let g = Graph::new(fw);
    let mut found = labelling::preferred(&g)
        .into_iter()
        .map(|members| g.extension(members))
        .collect::<Vec<_>>();
    found.sort();
    found
}

/// All admissible sets closed under defence.
pub fn complete_extensions(fw: &ArgumentationFramework) -> Vec<Extension> {
    let g = Graph::new(fw);
    let mut found: Vec<Extension> = labelling::admissible(&g)
        .into_iter()
        .filter(|members| {
            let mut in_set = vec![false; g.len()];
            for &m in members {
                in_set[m] = true;
            }
            (0..g.len()).all(|a| {
                in_set[a]
                    || !g.attackers[a]
                        .iter()
                        .all(|&b| g.attackers[b].iter().any(|&c| in_set[c]))
            })
        })
        .map(|members| g.extension(members))
        .collect();
    found.sort();
    found
}

/// Conflict-free sets attacking every non-member.
pub fn stable_extensions(fw: &ArgumentationFramework) -> Vec<Extension> {
    let all: BTreeSet<ArgumentId> = fw.ids().cloned().collect();
    complete_extensions(fw)
        .into_iter()
        .filter(|ext| {
            all.iter().all(|a| {
                ext.contains(a) || fw.attacks().any(|att| &att.to == a && ext.contains(&att.from))
            })
        })
        .collect()
}

/// Membership in at least one preferred extension.
pub fn is_acceptable_credulous(
    fw: &ArgumentationFramework,
    arg: &ArgumentId,
) -> Result<bool, FrameworkError> {
    fw.require(arg)?;
    Ok(preferred_extensions(fw).iter().any(|e| e.contains(arg)))
}
