//! Backtracking search for a large automaton that rejects every relator.
//!
//! A relator `w` is rejected as soon as one of its transitions is missing:
//! `w[0] ∉ σ_∅`, or `w[i+1] ∉ σ_{w[i]}` for an interior pair, or (for
//! e-automata) the last letter is missing from `τ` of the one before it.
//! Starting from the full automaton, the search removes transitions so that
//! every relator loses at least one, while each state keeps enough letters to
//! stay large. That is a hitting-set problem with per-state capacities.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::automata::{min_size_at_least, min_size_exceeding, BAutomaton, EAutomaton};
use crate::letterset::LetterSet;
use crate::words::{Alphabet, Letter, Word};
use crate::Rational;

/// Result of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    /// An avoiding automaton.
    Found(T),
    /// The search space was exhausted: no avoiding automaton exists.
    Exhausted,
    /// The node budget ran out first.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Search<T> {
    pub outcome: SearchOutcome<T>,
    /// Search nodes visited.
    pub nodes: u64,
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match &self.outcome {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// A removable transition: `(state, letter)`. State 0 is `∅`, states
/// `1..=m` are the `σ_s`, states `m+1..=2m` the `τ_s`.
type Removal = (u32, u32);

struct Problem {
    capacity: Vec<usize>,
    /// Options per relator, deduplicated and sorted.
    options: Vec<Vec<Removal>>,
}

struct Solver<'p> {
    problem: &'p Problem,
    removed: BTreeSet<Removal>,
    /// Transitions a sibling branch already tried removing; kept from then on.
    kept: BTreeSet<Removal>,
    used: Vec<usize>,
    nodes: u64,
    budget: u64,
}

enum Step {
    Solved,
    Failed,
    Timeout,
}

impl Solver<'_> {
    fn viable(&self, r: Removal) -> bool {
        !self.removed.contains(&r)
            && !self.kept.contains(&r)
            && self.used[r.0 as usize] < self.problem.capacity[r.0 as usize]
    }

    fn hit(&self, opts: &[Removal]) -> bool {
        opts.iter().any(|r| self.removed.contains(r))
    }

    fn dfs(&mut self) -> Step {
        if self.nodes >= self.budget {
            return Step::Timeout;
        }
        self.nodes += 1;

        // Most constrained unhit relator; ties go to the lowest index.
        let mut best: Option<(usize, usize)> = None;
        for (i, opts) in self.problem.options.iter().enumerate() {
            if self.hit(opts) {
                continue;
            }
            let viable = opts.iter().filter(|&&r| self.viable(r)).count();
            if viable == 0 {
                return Step::Failed;
            }
            if best.is_none_or(|(_, v)| viable < v) {
                best = Some((i, viable));
            }
        }
        let Some((rel, _)) = best else { return Step::Solved };

        let mut choices: Vec<Removal> = self.problem.options[rel].iter().copied().filter(|&r| self.viable(r)).collect();
        // Least-constrained state first, then state and letter index.
        choices.sort_by_key(|&(s, l)| {
            let slack = self.problem.capacity[s as usize] - self.used[s as usize];
            (usize::MAX - slack, s, l)
        });

        // Branch i removes choice i and keeps choices 0..i, so no removal
        // set is reached twice.
        let mut step = Step::Failed;
        let mut kept_here = Vec::new();
        for r in choices {
            self.removed.insert(r);
            self.used[r.0 as usize] += 1;
            match self.dfs() {
                Step::Failed => {
                    self.removed.remove(&r);
                    self.used[r.0 as usize] -= 1;
                    self.kept.insert(r);
                    kept_here.push(r);
                }
                other => {
                    step = other;
                    break;
                }
            }
        }
        for r in kept_here {
            self.kept.remove(&r);
        }
        step
    }
}

fn solve(problem: &Problem, budget: u64) -> (SearchOutcome<BTreeSet<Removal>>, u64) {
    let mut solver = Solver {
        problem,
        removed: BTreeSet::new(),
        kept: BTreeSet::new(),
        used: vec![0; problem.capacity.len()],
        nodes: 0,
        budget,
    };
    let outcome = match solver.dfs() {
        Step::Solved => SearchOutcome::Found(solver.removed),
        Step::Failed => SearchOutcome::Exhausted,
        Step::Timeout => SearchOutcome::Timeout,
    };
    (outcome, solver.nodes)
}

fn relator_options(relators: &[Word], m: u32, final_tau: bool) -> Vec<Vec<Removal>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in relators {
        let letters = w.letters();
        if letters.is_empty() || letters.iter().any(|l| l.0 >= m) {
            // Never accepted: nothing to break.
            continue;
        }
        let mut opts = vec![(0, letters[0].0)];
        let pairs = letters.len() - 1;
        for (i, p) in letters.windows(2).enumerate() {
            let state = if final_tau && i + 1 == pairs { 1 + m + p[0].0 } else { 1 + p[0].0 };
            opts.push((state, p[1].0));
        }
        opts.sort_unstable();
        opts.dedup();
        if seen.insert(opts.clone()) {
            out.push(opts);
        }
    }
    out
}

fn complement(m: u32, removed: &BTreeSet<Removal>, state: u32) -> LetterSet {
    let mut set = LetterSet::full(m);
    for &(_, l) in removed.range((state, 0)..=(state, u32::MAX)) {
        set.remove(Letter(l));
    }
    set
}

/// Searches for a λ-large b-automaton whose language misses every relator.
pub fn find_avoiding_b_automaton(
    alphabet: &Alphabet,
    relators: &[Word],
    lambda: Rational,
    budget: u64,
) -> Search<BAutomaton> {
    let m = alphabet.size();
    let k = min_size_at_least(lambda, m);
    let mut capacity = vec![m as usize - 1];
    capacity.extend(core::iter::repeat_n((m as usize).saturating_sub(k), m as usize));
    let problem = Problem { capacity, options: relator_options(relators, m, false) };
    let (outcome, nodes) = solve(&problem, budget);
    let outcome = match outcome {
        SearchOutcome::Found(removed) => {
            let sigma = (0..m).map(|s| complement(m, &removed, 1 + s)).collect();
            let a =
                BAutomaton::new(*alphabet, complement(m, &removed, 0), sigma).expect("sets built over the alphabet");
            SearchOutcome::Found(a)
        }
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::Timeout => SearchOutcome::Timeout,
    };
    Search { outcome, nodes }
}

/// Searches for a (λ, ε)-large e-automaton whose language misses every relator.
pub fn find_avoiding_e_automaton(
    alphabet: &Alphabet,
    relators: &[Word],
    lambda: Rational,
    eps: Rational,
    budget: u64,
) -> Search<EAutomaton> {
    let m = alphabet.size();
    let k = min_size_at_least(lambda, m);
    let kt = min_size_exceeding(Rational::new(1, 2) - eps, m);
    let mut capacity = vec![m as usize - 1];
    capacity.extend(core::iter::repeat_n((m as usize).saturating_sub(k), m as usize));
    capacity.extend(core::iter::repeat_n((m as usize).saturating_sub(kt), m as usize));
    let problem = Problem { capacity, options: relator_options(relators, m, true) };
    let (outcome, nodes) = solve(&problem, budget);
    let outcome = match outcome {
        SearchOutcome::Found(removed) => {
            let sigma = (0..m).map(|s| complement(m, &removed, 1 + s)).collect();
            let tau = (0..m).map(|s| complement(m, &removed, 1 + m + s)).collect();
            let base =
                BAutomaton::new(*alphabet, complement(m, &removed, 0), sigma).expect("sets built over the alphabet");
            SearchOutcome::Found(EAutomaton::new(base, tau).expect("sets built over the alphabet"))
        }
        SearchOutcome::Exhausted => SearchOutcome::Exhausted,
        SearchOutcome::Timeout => SearchOutcome::Timeout,
    };
    Search { outcome, nodes }
}
