//! Backtracking search over partial labellings.
//!
//! Each argument is either undetermined, In, or excluded. Labelling an
//! argument In excludes everything it attacks and everything attacking it;
//! the attackers additionally become *owed* an In attacker (they must end up
//! Out, not Undecided). A branch dies as soon as an owed argument has no
//! attacker left that could still be labelled In.
//!
//! Every admissible set is reached by exactly one branch: at each
//! undetermined argument the branch chooses In iff the argument belongs to
//! the set.

use super::Graph;

#[derive(Clone)]
struct State {
    included: Vec<bool>,
    excluded: Vec<bool>,
    owed: Vec<bool>,
}

impl State {
    fn new(n: usize) -> Self {
        Self {
            included: vec![false; n],
            excluded: vec![false; n],
            owed: vec![false; n],
        }
    }

    fn next_undetermined(&self) -> Option<usize> {
        (0..self.included.len()).find(|&i| !self.included[i] && !self.excluded[i])
    }

    fn label_in(&mut self, g: &Graph, a: usize) -> bool {
        self.included[a] = true;
        for &t in &g.targets[a] {
            if self.included[t] {
                return false;
            }
            self.excluded[t] = true;
        }
        for &b in &g.attackers[a] {
            if self.included[b] {
                return false;
            }
            self.excluded[b] = true;
            self.owed[b] = true;
        }
        true
    }

    /// Every owed argument still has an attacker that is In or may become In.
    fn consistent(&self, g: &Graph) -> bool {
        (0..self.owed.len()).all(|b| {
            !self.owed[b] || g.attackers[b].iter().any(|&c| !self.excluded[c])
        })
    }

    /// At a leaf: every owed argument is attacked by an In argument.
    fn justified(&self, g: &Graph) -> bool {
        (0..self.owed.len())
            .all(|b| !self.owed[b] || g.attackers[b].iter().any(|&c| self.included[c]))
    }
}

fn is_subset(small: &[bool], big: &[bool]) -> bool {
    small.iter().zip(big).all(|(s, b)| !*s || *b)
}

struct Search<'g> {
    g: &'g Graph,
    maximal_only: bool,
    found: Vec<Vec<bool>>,
}

impl Search<'_> {
    fn run(&mut self, state: State) {
        if self.maximal_only {
            let reachable: Vec<bool> = state
                .included
                .iter()
                .zip(&state.excluded)
                .map(|(i, e)| *i || !*e)
                .collect();
            if self.found.iter().any(|f| is_subset(&reachable, f)) {
                return;
            }
        }
        let Some(a) = state.next_undetermined() else {
            if state.justified(self.g) {
                self.record(state.included);
            }
            return;
        };

        let mut with = state.clone();
        if with.label_in(self.g, a) && with.consistent(self.g) {
            self.run(with);
        }

        let mut without = state;
        without.excluded[a] = true;
        if without.consistent(self.g) {
            self.run(without);
        }
    }

    fn record(&mut self, set: Vec<bool>) {
        if !self.maximal_only {
            self.found.push(set);
            return;
        }
        if self.found.iter().any(|f| is_subset(&set, f)) {
            return;
        }
        self.found.retain(|f| !is_subset(f, &set));
        self.found.push(set);
    }
}

fn search(g: &Graph, maximal_only: bool) -> Vec<Vec<usize>> {
    let mut s = Search {
        g,
        maximal_only,
        found: Vec::new(),
    };
    s.run(State::new(g.len()));
    s.found
        .into_iter()
        .map(|set| (0..set.len()).filter(|&i| set[i]).collect())
        .collect()
}

pub(super) fn admissible(g: &Graph) -> Vec<Vec<usize>> {
    search(g, false)
}

pub(super) fn preferred(g: &Graph) -> Vec<Vec<usize>> {
    search(g, true)
}
