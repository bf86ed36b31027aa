//! Fixtures and generators shared by the test suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::aaf::{Argument, ArgumentId, ArgumentationFramework};
use crate::agents::{Case, ScriptedBackend};
use crate::dialogue::{Move, Payload, Speaker};

pub const MAX_RANDOM_SIZE: usize = 12;

/// Three mutually exclusive treatments A, B, C; beliefs D and E are
/// unattacked and both attack A.
pub fn migraine_example() -> ArgumentationFramework {
    let mut fw = ArgumentationFramework::new();
    for (id, drug) in [("A", "Topiramate"), ("B", "Propranolol"), ("C", "Verapamil")] {
        fw.add_argument(Argument::decision(id).with_conclusion(format!("{drug} should be adopted.")))
            .unwrap();
    }
    fw.add_argument(Argument::belief("D").with_conclusion("The patient is pregnant."))
        .unwrap();
    fw.add_argument(Argument::belief("E").with_conclusion("Topiramate is teratogenic."))
        .unwrap();
    fw.add_attack("D", "A").unwrap();
    fw.add_attack("E", "A").unwrap();
    fw
}

pub const MIGRAINE_TEXT: &str = "\
% three exclusive treatments, two beliefs against A
arg(A).
arg(B).
arg(C).
arg(D).
arg(E).
kind(A,decision).
kind(B,decision).
kind(C,decision).
kind(D,belief).
kind(E,belief).
att(A,B).
att(A,C).
att(B,A).
att(B,C).
att(C,A).
att(C,B).
att(D,A).
att(E,A).
";

/// `k` decisions, each attacked by its own unattacked belief.
pub fn all_decisions_defeated(k: usize) -> ArgumentationFramework {
    let mut fw = ArgumentationFramework::new();
    for i in 0..k {
        fw.add_argument(Argument::decision(format!("T{i}"))).unwrap();
        fw.add_argument(Argument::belief(format!("X{i}"))).unwrap();
        fw.add_attack(format!("X{i}"), format!("T{i}")).unwrap();
    }
    fw
}

/// A well-formed framework of 1 to 12 arguments. Attack density is drawn
/// from [0.1, 0.5]; decisions get their mutual attacks on insertion and
/// decision-to-belief edges are never drawn.
pub fn random_framework(rng: &mut impl Rng) -> ArgumentationFramework {
    let n = rng.random_range(1..=MAX_RANDOM_SIZE);
    let density = rng.random_range(0.1..=0.5);
    let decision_share = rng.random_range(0.0..=0.5);
    let mut fw = ArgumentationFramework::new();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("a{i}");
        let arg = if rng.random_bool(decision_share) {
            Argument::decision(id.as_str())
        } else {
            Argument::belief(id.as_str())
        };
        fw.add_argument(arg).unwrap();
        ids.push(id);
    }
    for from in &ids {
        for to in &ids {
            if rng.random_bool(density) {
                // forbidden pairs are simply skipped
                let _ = fw.add_attack(from.as_str(), to.as_str());
            }
        }
    }
    fw
}

/// `count` frameworks from a fixed seed.
pub fn random_corpus(seed: u64, count: usize) -> Vec<ArgumentationFramework> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_framework(&mut rng)).collect()
}

const MOVE_IDS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn any_id(rng: &mut impl Rng) -> ArgumentId {
    ArgumentId::from(MOVE_IDS[rng.random_range(0..MOVE_IDS.len())])
}

/// A move sequence of 1 to 10 moves over a six-argument vocabulary, biased
/// towards well-formed dialogues so that both legal and illegal sequences
/// are common. Indices are usually right; speakers usually match payloads.
pub fn random_moves(rng: &mut impl Rng) -> Vec<Move> {
    let len = rng.random_range(1..=10);
    let mut moves: Vec<Move> = Vec::with_capacity(len);
    let mut proposed: Vec<ArgumentId> = Vec::new();
    let mut last_rejected: Option<ArgumentId> = None;
    for i in 0..len {
        let previous_was_proposal = matches!(moves.last().map(|m| &m.payload), Some(Payload::ProposeArgument { .. }));
        let verifier_turn = if rng.random_bool(0.9) {
            previous_was_proposal
        } else {
            rng.random_bool(0.5)
        };
        let payload = if verifier_turn {
            let target = match proposed.last() {
                Some(id) if rng.random_bool(0.9) => id.clone(),
                _ => any_id(rng),
            };
            if rng.random_bool(0.4) {
                last_rejected = Some(target.clone());
                Payload::PoseCq {
                    cq_id: "CQ".into(),
                    target,
                    rejected: true,
                    reason: "rejected".into(),
                }
            } else {
                last_rejected = None;
                Payload::AcceptArgument { target }
            }
        } else {
            let fresh: Vec<&str> = MOVE_IDS
                .iter()
                .copied()
                .filter(|id| !proposed.iter().any(|p| p.as_str() == *id))
                .collect();
            let id = if !fresh.is_empty() && rng.random_bool(0.92) {
                ArgumentId::from(fresh[rng.random_range(0..fresh.len())])
            } else {
                any_id(rng)
            };
            let target = match (&last_rejected, rng.random_range(0..20)) {
                (_, 0) => Some(any_id(rng)),
                (Some(r), 1..=17) => Some(r.clone()),
                (Some(_), _) => None,
                (None, 1..=7) if !proposed.is_empty() => Some(proposed[rng.random_range(0..proposed.len())].clone()),
                (None, _) => None,
            };
            let decision = if target.is_some() { 0.15 } else { 0.6 };
            let argument = if rng.random_bool(decision) {
                Argument::decision(id.clone())
            } else {
                Argument::belief(id.clone())
            };
            proposed.push(id);
            last_rejected = None;
            Payload::ProposeArgument {
                argument,
                attacks_target: target,
            }
        };
        let mut speaker = payload.speaker();
        if rng.random_bool(0.02) {
            speaker = match speaker {
                Speaker::Generator => Speaker::Verifier,
                Speaker::Verifier => Speaker::Generator,
            };
        }
        let index = if rng.random_bool(0.02) { i + 2 } else { i + 1 };
        moves.push(Move { index, speaker, payload });
    }
    moves
}

pub fn depression_case() -> Case {
    Case {
        case_id: "insomnia-depression".into(),
        text: "A 45-year-old patient with major depressive disorder reports persistent insomnia \
               and has had sexual dysfunction on a previous antidepressant. Which antidepressant \
               should be started?"
            .into(),
    }
}

fn fenced(json: &str) -> String {
    format!("```json\n{json}\n```")
}

/// Generator completions for the depression case: Paroxetine, its side
/// effect once rejected, then Trazodone, then done.
pub fn depression_generator_script() -> Vec<String> {
    [
        r#"{"type": "argument", "scheme": "ASDM", "bindings": {"condition": "major depression with insomnia", "treatment": "Paroxetine"}}"#,
        r#"{"type": "argument", "scheme": "ASSE", "bindings": {"treatment": "Paroxetine", "side_effect": "sexual dysfunction"}, "attacks": "A"}"#,
        r#"{"type": "argument", "scheme": "ASDM", "bindings": {"condition": "major depression with insomnia", "treatment": "Trazodone"}}"#,
        r#"{"type": "done"}"#,
    ]
    .into_iter()
    .map(fenced)
    .collect()
}

/// Verifier completions matching [`depression_generator_script`]: one
/// verdict per critical question asked.
pub fn depression_verifier_script() -> Vec<String> {
    let pass = |cq: &str| fenced(&format!(r#"{{"type": "verdict", "cq": "{cq}", "rejected": false, "reason": "no concern"}}"#));
    vec![
        pass("ASDM.alternatives"),
        fenced(r#"{"type": "verdict", "cq": "ASDM.side_effects", "rejected": true, "reason": "Paroxetine commonly causes sexual dysfunction, which this patient has had before."}"#),
        pass("ASSE.association"),
        pass("ASSE.relevance"),
        pass("ASDM.alternatives"),
        pass("ASDM.side_effects"),
        pass("ASDM.contraindications"),
        pass("ASDM.efficacy"),
    ]
}

pub fn depression_backends() -> (ScriptedBackend, ScriptedBackend) {
    (
        ScriptedBackend::new(depression_generator_script()),
        ScriptedBackend::new(depression_verifier_script()),
    )
}
