use std::collections::BTreeSet;

use clinarg::aaf::{format, Argument, ArgumentId, ArgumentKind, ArgumentationFramework};
use clinarg::decision::{detect_reasoning_error, explanation_sets, optional_decisions};
use clinarg::semantics::{self, brute_force_preferred, grounded_extension, preferred_extensions};
use clinarg::testing::random_framework;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn frameworks() -> impl Strategy<Value = ArgumentationFramework> {
    any::<u64>().prop_map(|seed| random_framework(&mut StdRng::seed_from_u64(seed)))
}

fn set(ext: &semantics::Extension) -> BTreeSet<ArgumentId> {
    ext.members().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_frameworks_are_well_formed(fw in frameworks()) {
        prop_assert!(fw.len() <= 12);
        prop_assert!(fw.validate().is_valid());
    }

    #[test]
    fn labelling_matches_oracle(fw in frameworks()) {
        prop_assert_eq!(preferred_extensions(&fw), brute_force_preferred(&fw).unwrap());
    }

    #[test]
    fn grounded_inside_every_preferred(fw in frameworks()) {
        let grounded = grounded_extension(&fw);
        let preferred = preferred_extensions(&fw);
        prop_assert!(!preferred.is_empty());
        for p in &preferred {
            prop_assert!(grounded.is_subset(p), "{grounded} not in {p}");
            prop_assert!(semantics::is_admissible(&fw, &set(p)).unwrap());
        }
        prop_assert!(semantics::is_admissible(&fw, &set(&grounded)).unwrap());
    }

    #[test]
    fn preferred_are_maximal(fw in frameworks()) {
        // every admissible set lies under some oracle extension, so a strict
        // admissible superset would show up as a strict oracle superset
        let oracle = brute_force_preferred(&fw).unwrap();
        for p in preferred_extensions(&fw) {
            prop_assert!(!oracle.iter().any(|q| p.is_subset(q) && *q != p));
        }
    }

    #[test]
    fn unattacked_attacker_defeats(fw in frameworks(), pick in any::<prop::sample::Index>()) {
        let ids: Vec<ArgumentId> = fw.ids().cloned().collect();
        let target = pick.get(&ids).clone();
        let mut fw = fw;
        fw.add_argument(Argument::belief("fresh")).unwrap();
        fw.add_attack("fresh", target.clone()).unwrap();
        prop_assert!(!grounded_extension(&fw).contains(&target));
        for p in preferred_extensions(&fw) {
            prop_assert!(!p.contains(&target));
        }
    }

    #[test]
    fn repeated_calls_agree(fw in frameworks()) {
        prop_assert_eq!(preferred_extensions(&fw), preferred_extensions(&fw.clone()));
        prop_assert_eq!(grounded_extension(&fw), grounded_extension(&fw));
        prop_assert_eq!(detect_reasoning_error(&fw).unwrap(), detect_reasoning_error(&fw).unwrap());
    }

    #[test]
    fn at_most_one_decision_per_coherent_set(fw in frameworks()) {
        let decisions: Vec<ArgumentId> = fw.decisions().cloned().collect();
        for (i, a) in decisions.iter().enumerate() {
            for b in &decisions[i + 1..] {
                let pair = BTreeSet::from([a.clone(), b.clone()]);
                prop_assert!(!semantics::is_conflict_free(&fw, &pair).unwrap());
            }
        }
        for p in brute_force_preferred(&fw).unwrap() {
            let n = p.iter().filter(|id| fw.kind_of(id) == Ok(ArgumentKind::Decision)).count();
            prop_assert!(n <= 1);
        }
    }

    #[test]
    fn error_flag_iff_no_optional_decision(fw in frameworks()) {
        let report = detect_reasoning_error(&fw).unwrap();
        prop_assert_eq!(report.error_flag, report.optional_decisions.is_empty());
        prop_assert_eq!(report.error_note.is_some(), report.error_flag);
    }

    #[test]
    fn optional_decisions_match_oracle(fw in frameworks()) {
        let oracle = brute_force_preferred(&fw).unwrap();
        let expected: Vec<ArgumentId> = fw
            .decisions()
            .filter(|d| oracle.iter().any(|p| p.contains(d)))
            .cloned()
            .collect();
        prop_assert_eq!(optional_decisions(&fw).unwrap(), expected);
    }

    #[test]
    fn explanation_sets_are_admissible_with_one_decision(fw in frameworks()) {
        for e in explanation_sets(&fw).unwrap() {
            let full = e.full_set();
            prop_assert!(full.contains(&e.decision));
            prop_assert!(semantics::is_admissible(&fw, &full).unwrap());
            let n = full.iter().filter(|id| fw.kind_of(id) == Ok(ArgumentKind::Decision)).count();
            prop_assert_eq!(n, 1);
        }
    }

    #[test]
    fn text_round_trip(fw in frameworks()) {
        let loaded = format::parse_text(&format::to_text(&fw)).unwrap();
        prop_assert!(loaded.warnings.is_empty());
        let back = loaded.framework;
        prop_assert_eq!(back.ids().collect::<Vec<_>>(), fw.ids().collect::<Vec<_>>());
        prop_assert_eq!(back.attacks().collect::<Vec<_>>(), fw.attacks().collect::<Vec<_>>());
        for id in fw.ids() {
            prop_assert_eq!(back.kind_of(id), fw.kind_of(id));
        }
    }

    #[test]
    fn json_round_trip(fw in frameworks()) {
        let back = format::from_json(&format::to_json(&fw)).unwrap();
        prop_assert_eq!(back, fw);
    }
}

#[test]
fn decisions_only_give_singleton_sets() {
    let mut fw = ArgumentationFramework::new();
    for id in ["A", "B", "C"] {
        fw.add_argument(Argument::decision(id)).unwrap();
    }
    let sets = explanation_sets(&fw).unwrap();
    assert_eq!(sets.len(), 3);
    assert!(sets.iter().all(|s| s.full_set().len() == 1));
}
