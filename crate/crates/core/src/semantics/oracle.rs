//! Naive subset enumeration of preferred extensions.
//!
//! Shares nothing with the labelling search beyond the framework type: it
//! walks all `2^n` subsets as bitmasks, tests admissibility straight from the
//! attack pairs and keeps the subset-maximal survivors.

use crate::aaf::{ArgumentId, ArgumentationFramework};

use super::{Extension, SemanticsError};

pub const DEFAULT_ORACLE_CAP: usize = 16;

pub fn brute_force_preferred(fw: &ArgumentationFramework) -> Result<Vec<Extension>, SemanticsError> {
    brute_force_preferred_with_cap(fw, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_preferred_with_cap(
    fw: &ArgumentationFramework,
    cap: usize,
) -> Result<Vec<Extension>, SemanticsError> {
    let ids: Vec<&ArgumentId> = fw.ids().collect();
    let n = ids.len();
    if n > cap || n >= 64 {
        return Err(SemanticsError::TooLarge { size: n, cap });
    }
    let pos = |id: &ArgumentId| ids.iter().position(|x| *x == id);
    // attacked_by[i]: bitmask of arguments attacking i
    let mut attacked_by = vec![0u64; n];
    for att in fw.attacks() {
        if let (Some(f), Some(t)) = (pos(&att.from), pos(&att.to)) {
            attacked_by[t] |= 1 << f;
        }
    }
    // hits(s): everything attacked by some member of s
    let hits = |s: u64| -> u64 {
        (0..n)
            .filter(|&t| attacked_by[t] & s != 0)
            .fold(0u64, |acc, t| acc | (1 << t))
    };
    let admissible = |s: u64| -> bool {
        let hit = hits(s);
        if hit & s != 0 {
            return false;
        }
        (0..n)
            .filter(|&a| s & (1 << a) != 0)
            .all(|a| attacked_by[a] & !hit == 0)
    };

    let mut admissible_sets: Vec<u64> = (0..(1u64 << n)).filter(|&s| admissible(s)).collect();
    // Any admissible strict superset has more members, so it is seen first.
    admissible_sets.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    let mut maximal_masks: Vec<u64> = Vec::new();
    for s in admissible_sets {
        if !maximal_masks.iter().any(|&m| m & s == s) {
            maximal_masks.push(s);
        }
    }
    let mut maximal: Vec<Extension> = maximal_masks
        .iter()
        .map(|&s| {
            Extension::new(
                (0..n)
                    .filter(|&i| s & (1 << i) != 0)
                    .map(|i| ids[i].clone()),
            )
        })
        .collect();
    maximal.sort();
    Ok(maximal)
}
