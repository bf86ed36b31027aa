//! Role prompts, loaded from an editable template file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::template::{Template, TemplateError};

const DEFAULT_PROMPTS: &str = include_str!("../../data/prompts.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptSet {
    pub generator_system: String,
    pub verifier_system: String,
    pub context: String,
    pub propose_decision: String,
    pub continue_discussion: String,
    pub counter_argument: String,
    pub verify_question: String,
    pub reprompt: String,
    /// Worked examples appended to the generator's system prompt.
    #[serde(default)]
    pub few_shot_generator: Vec<String>,
    #[serde(default)]
    pub few_shot_verifier: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("prompt file: {0}")]
    Load(String),
    #[error("prompt `{name}`: {source}")]
    Template { name: &'static str, source: TemplateError },
}

pub(crate) type Vars = BTreeMap<String, String>;

impl Default for PromptSet {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_PROMPTS).expect("default prompts are well-formed")
    }
}

impl PromptSet {
    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Load(format!("{}: {e}", path.display())))?;
        let set: Self = serde_json::from_str(&source)
            .map_err(|e| PromptError::Load(format!("{}: {e}", path.display())))?;
        set.check()?;
        Ok(set)
    }

    pub fn default_json() -> &'static str {
        DEFAULT_PROMPTS
    }

    fn fields(&self) -> [(&'static str, &str); 8] {
        [
            ("generator_system", &self.generator_system),
            ("verifier_system", &self.verifier_system),
            ("context", &self.context),
            ("propose_decision", &self.propose_decision),
            ("continue_discussion", &self.continue_discussion),
            ("counter_argument", &self.counter_argument),
            ("verify_question", &self.verify_question),
            ("reprompt", &self.reprompt),
        ]
    }

    /// Every template parses.
    pub fn check(&self) -> Result<(), PromptError> {
        for (name, source) in self.fields() {
            Template::parse(source).map_err(|source| PromptError::Template { name, source })?;
        }
        Ok(())
    }

    pub(crate) fn render(&self, name: &'static str, vars: &Vars) -> Result<String, PromptError> {
        let source = self
            .fields()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s)
            .expect("known prompt name");
        crate::template::render(source, vars).map_err(|source| PromptError::Template { name, source })
    }

    pub(crate) fn with_examples(base: String, examples: &[String]) -> String {
        if examples.is_empty() {
            return base;
        }
        let mut out = base;
        out.push_str("\n\nExamples:");
        for ex in examples {
            out.push_str("\n\n");
            out.push_str(ex);
        }
        out
    }
}
