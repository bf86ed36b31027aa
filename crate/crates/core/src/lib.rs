//! Clinical decision reasoning over typed abstract argumentation frameworks.
//!
//! * [`aaf`]: frameworks of decision and belief arguments, plus file formats
//! * [`semantics`]: grounded and preferred extensions, with a brute-force oracle
//! * [`decision`]: optional decisions, explanation sets, reasoning-error flag
//! * [`schemes`]: argumentation schemes and critical questions
//! * [`dialogue`]: the generator/verifier move protocol
//! * [`agents`]: backends and the orchestration loop driving a case
//! * [`export`]: Graphviz DOT rendering

pub mod aaf;
pub mod agents;
pub mod decision;
pub mod dialogue;
pub mod export;
pub mod schemes;
pub mod semantics;
pub mod template;

#[cfg(feature = "test-util")]
pub mod testing;

pub use aaf::{Argument, ArgumentId, ArgumentKind, ArgumentationFramework, Attack};
pub use decision::{detect_reasoning_error, DecisionReport, ExplanationSet};
pub use semantics::Extension;
