//! Sufficient conditions for property (FA).
//!
//! A presentation `⟨S | R⟩` has (FA) when `R` meets the language of every
//! 1/3-large b-automaton over `S`. In the cyclically reduced model the same
//! holds when the relators of length at least 3 meet the language of every
//! (5/18, 1/18)-large e-automaton. Both checks are one-sided: a witness
//! automaton only shows the hypothesis fails, not that the group splits.

mod abelian;
mod search;

pub use abelian::{admits_z_epimorphism, epimorphism_automaton, exponent_sum_rank, WeightFunction};
pub use search::{find_avoiding_b_automaton, find_avoiding_e_automaton, Search, SearchOutcome};

use alloc::vec::Vec;
use core::ops::Range;

use crate::automata::{AutomatonSpace, BAutomaton, EAutomaton, DEFAULT_ENUMERATION_BITS};
use crate::error::Result;
use crate::letterset::LetterSet;
use crate::words::{Alphabet, Presentation, Word};
use crate::Rational;

/// Largeness constant of the b-automaton certificate.
pub const FA_LAMBDA: Rational = Rational::new_raw(1, 3);
/// `ε₀`: every `n ≥ 2` and `B ≥ 3` admit this constant in the block counting bound.
pub const EPS0: Rational = Rational::new_raw(1, 18);
/// `ε = min{ε₀, 1/6}`.
pub const CYCLIC_EPS: Rational = Rational::new_raw(1, 18);
/// `λ = 1/4 + ε/2`.
pub const CYCLIC_LAMBDA: Rational = Rational::new_raw(5, 18);
/// Default node budget for the avoiding-automaton search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Certified,
    NotCertified,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Enumeration,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    B(BAutomaton),
    E(EAutomaton),
}

impl Witness {
    pub fn accepts(&self, w: &Word) -> Result<bool> {
        match self {
            Witness::B(a) => a.accepts(w),
            Witness::E(e) => e.accepts(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateVerdict {
    pub status: Status,
    /// Present exactly when the status is `NotCertified`.
    pub witness: Option<Witness>,
    pub lambda: Rational,
    pub eps: Option<Rational>,
    pub method: Method,
    /// Automata examined (enumeration) or search nodes visited.
    pub budget_spent: u64,
}

impl CertificateVerdict {
    /// Replays the witness: large at the stated parameters and rejecting
    /// every relator that the check considered.
    pub fn witness_is_valid(&self, relators: &[Word]) -> bool {
        let Some(w) = &self.witness else { return self.status != Status::NotCertified };
        let large = match (w, self.eps) {
            (Witness::B(a), _) => a.is_lambda_large(self.lambda),
            (Witness::E(e), Some(eps)) => e.is_lambda_eps_large(self.lambda, eps),
            (Witness::E(_), None) => false,
        };
        large && relators.iter().filter(|r| !r.is_empty()).all(|r| !w.accepts(r).unwrap_or(true))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateOptions {
    pub search_budget: u64,
    /// Enumerate when the automaton space has at most this many bits of state.
    pub enumeration_bits: u32,
    pub force_search: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            search_budget: DEFAULT_SEARCH_BUDGET,
            enumeration_bits: DEFAULT_ENUMERATION_BITS,
            force_search: false,
        }
    }
}

/// Relator transitions packed for mask-level acceptance tests.
struct PackedRelator {
    first: u64,
    /// `(state, bit)` pairs that must all be present.
    pairs: Vec<(usize, u64)>,
}

fn pack(relators: &[Word], m: u32) -> Vec<PackedRelator> {
    relators
        .iter()
        .filter(|w| !w.is_empty() && w.iter().all(|l| l.0 < m))
        .map(|w| PackedRelator {
            first: 1 << w.letters()[0].0,
            pairs: w.letters().windows(2).map(|p| (p[0].index(), 1u64 << p[1].0)).collect(),
        })
        .collect()
}

/// Enumerates the start-set partitions `starts` of the λ-large space and
/// returns the first automaton that accepts no relator, with the number of
/// automata examined.
pub fn first_avoiding_in_starts(
    space: &AutomatonSpace,
    relators: &[Word],
    starts: Range<usize>,
) -> (Option<BAutomaton>, u64) {
    let m = space.alphabet().size();
    let packed = pack(relators, m);
    let mut examined = 0u64;
    for a in space.iter_starts(starts) {
        examined += 1;
        let start = a.sigma_empty().words()[0];
        let masks: Vec<u64> = a.sigmas().iter().map(|s| s.words()[0]).collect();
        let hit = packed.iter().any(|r| start & r.first != 0 && r.pairs.iter().all(|&(s, bit)| masks[s] & bit != 0));
        if !hit {
            return (Some(a), examined);
        }
    }
    (None, examined)
}

/// Whether every λ-large b-automaton accepts at least one relator, decided by
/// enumeration. Fails when the automaton space exceeds the enumeration budget.
pub fn check_all_large_intersect(p: &Presentation, lambda: Rational) -> Result<bool> {
    let space = AutomatonSpace::large(p.alphabet, lambda, DEFAULT_ENUMERATION_BITS)?;
    let (w, _) = first_avoiding_in_starts(&space, &p.relators, 0..space.start_options().len());
    Ok(w.is_none())
}

fn verdict_from_search<T>(
    search: Search<T>,
    wrap: impl FnOnce(T) -> Witness,
    lambda: Rational,
    eps: Option<Rational>,
) -> CertificateVerdict {
    let (status, witness) = match search.outcome {
        SearchOutcome::Found(a) => (Status::NotCertified, Some(wrap(a))),
        SearchOutcome::Exhausted => (Status::Certified, None),
        SearchOutcome::Timeout => (Status::Unknown, None),
    };
    CertificateVerdict { status, witness, lambda, eps, method: Method::Search, budget_spent: search.nodes }
}

/// Checks the b-automaton certificate at an arbitrary λ.
pub fn certify_b(p: &Presentation, lambda: Rational, opts: CertificateOptions) -> CertificateVerdict {
    if !opts.force_search {
        if let Ok(space) = AutomatonSpace::large(p.alphabet, lambda, opts.enumeration_bits) {
            let (w, examined) = first_avoiding_in_starts(&space, &p.relators, 0..space.start_options().len());
            return CertificateVerdict {
                status: if w.is_some() { Status::NotCertified } else { Status::Certified },
                witness: w.map(Witness::B),
                lambda,
                eps: None,
                method: Method::Enumeration,
                budget_spent: examined,
            };
        }
    }
    let search = find_avoiding_b_automaton(&p.alphabet, &p.relators, lambda, opts.search_budget);
    verdict_from_search(search, Witness::B, lambda, None)
}

/// The b-automaton certificate at λ = 1/3; `Certified` implies (FA).
pub fn fa_certificate(p: &Presentation) -> CertificateVerdict {
    fa_certificate_with(p, CertificateOptions::default())
}

pub fn fa_certificate_with(p: &Presentation, opts: CertificateOptions) -> CertificateVerdict {
    certify_b(p, FA_LAMBDA, opts)
}

/// Relators of length at least 3, the ones the cyclic certificate looks at.
pub fn cyclic_relevant_relators(relators: &[Word]) -> Vec<Word> {
    relators.iter().filter(|r| r.len() >= 3).cloned().collect()
}

/// The e-automaton certificate at (λ, ε) = (5/18, 1/18) for the cyclically
/// reduced model. The e-automaton space has `2n(2n+1) + 4n²` bits of state,
/// past the enumeration budget for every `n ≥ 2`, so this always searches.
pub fn fa_certificate_cyclic(p: &Presentation) -> CertificateVerdict {
    fa_certificate_cyclic_with(p, CertificateOptions::default())
}

pub fn fa_certificate_cyclic_with(p: &Presentation, opts: CertificateOptions) -> CertificateVerdict {
    let relevant = cyclic_relevant_relators(&p.relators);
    let search = find_avoiding_e_automaton(&p.alphabet, &relevant, CYCLIC_LAMBDA, CYCLIC_EPS, opts.search_budget);
    verdict_from_search(search, Witness::E, CYCLIC_LAMBDA, Some(CYCLIC_EPS))
}

/// Automaton whose start set is a single letter and whose other sets are all
/// `S^±`; used by tests and examples.
pub fn starts_with(alphabet: Alphabet, letter: crate::words::Letter) -> BAutomaton {
    let mut a = BAutomaton::full(alphabet);
    a.set_sigma_empty(LetterSet::from_letters(alphabet.size(), [letter]));
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{relator_rng, sample_reduced, Letter};

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn pres(words: &[&str]) -> Presentation {
        let a = ab();
        Presentation::new(a, words.iter().map(|w| a.parse_word(w).unwrap()).collect()).unwrap()
    }

    fn all_reduced_len2() -> Presentation {
        let a = ab();
        let mut rels = Vec::new();
        for x in a.letters() {
            for y in a.letters() {
                if y != a.inv(x) {
                    rels.push(Word(vec![x, y]));
                }
            }
        }
        Presentation::new(a, rels).unwrap()
    }

    #[test]
    fn cyclic_constants() {
        assert_eq!(CYCLIC_EPS, EPS0.min(Rational::new(1, 6)));
        assert_eq!(CYCLIC_EPS, Rational::new(1, 18));
        assert_eq!(CYCLIC_LAMBDA, Rational::new(1, 4) + CYCLIC_EPS / 2);
        assert_eq!(CYCLIC_LAMBDA, Rational::new(5, 18));
    }

    #[test]
    fn enumeration_examples() {
        let lambda = FA_LAMBDA;
        assert!(check_all_large_intersect(&all_reduced_len2(), lambda).unwrap());
        assert!(!check_all_large_intersect(&pres(&[]), lambda).unwrap());
        assert!(!check_all_large_intersect(&pres(&["aba"]), lambda).unwrap());
        // The σ_∅ = {b} witness from the example.
        let witness = starts_with(ab(), Letter(1));
        assert!(witness.is_lambda_large(lambda));
        assert!(!witness.accepts(&ab().parse_word("aba").unwrap()).unwrap());
    }

    #[test]
    fn search_examples() {
        let s = find_avoiding_b_automaton(&ab(), &all_reduced_len2().relators, FA_LAMBDA, 1_000_000);
        assert_eq!(s.outcome, SearchOutcome::Exhausted);
        let a5 = Alphabet::new(5).unwrap();
        let r = sample_reduced(&a5, 12, &mut relator_rng(1, 0));
        let s = find_avoiding_b_automaton(&a5, core::slice::from_ref(&r), FA_LAMBDA, 100);
        let found = s.found().unwrap();
        assert!(found.is_lambda_large(FA_LAMBDA));
        assert!(!found.accepts(&r).unwrap());
        // Exactly one transition removed.
        let missing: usize =
            10 - found.sigma_empty().len() + found.sigmas().iter().map(|x| 10 - x.len()).sum::<usize>();
        assert_eq!(missing, 1);
    }

    #[test]
    fn search_timeout_is_reported() {
        let v = fa_certificate_with(
            &all_reduced_len2(),
            CertificateOptions { search_budget: 3, force_search: true, ..Default::default() },
        );
        assert_eq!(v.status, Status::Unknown);
        assert!(v.witness.is_none());
        assert_eq!(v.budget_spent, 3);
    }

    #[test]
    fn verdicts_carry_valid_witnesses() {
        let p = pres(&["aba", "bAb", "abAB"]);
        for force_search in [false, true] {
            let v = fa_certificate_with(&p, CertificateOptions { force_search, ..Default::default() });
            assert_eq!(v.status, Status::NotCertified);
            assert!(v.witness_is_valid(&p.relators));
            assert_eq!(v.method, if force_search { Method::Search } else { Method::Enumeration });
        }
        let v = fa_certificate(&all_reduced_len2());
        assert_eq!(v.status, Status::Certified);
        assert!(v.witness.is_none());
        assert!(!admits_z_epimorphism(&all_reduced_len2()));
    }

    #[test]
    fn superset_never_flips_certified() {
        let base = all_reduced_len2();
        let mut rng = relator_rng(4, 0);
        for _ in 0..5 {
            let mut p = base.clone();
            p.relators.push(sample_reduced(&p.alphabet, 5, &mut rng));
            assert_eq!(fa_certificate(&p).status, Status::Certified);
        }
    }

    #[test]
    fn search_agrees_with_enumeration_on_random_presentations() {
        let mut rng = relator_rng(8, 0);
        for i in 0..40u64 {
            let len = 1 + (i % 4) as usize;
            let count = 1 + rng_range(&mut rng, 14);
            let rels = (0..count).map(|_| sample_reduced(&ab(), len, &mut rng)).collect();
            let p = Presentation::new(ab(), rels).unwrap();
            let e = fa_certificate(&p);
            let s = fa_certificate_with(&p, CertificateOptions { force_search: true, ..Default::default() });
            assert_eq!(e.status, s.status, "presentation {:?}", p.relators);
            assert!(e.witness_is_valid(&p.relators));
            assert!(s.witness_is_valid(&p.relators));
        }
    }

    fn rng_range(rng: &mut impl rand::Rng, n: usize) -> usize {
        rng.gen_range(0..n)
    }

    #[test]
    fn cyclic_certificate_ignores_short_relators() {
        // Length-2 relators alone never certify: all of them are dropped.
        let v = fa_certificate_cyclic(&all_reduced_len2());
        assert_eq!(v.status, Status::NotCertified);
        assert!(v.witness_is_valid(&[]));
        assert_eq!(v.lambda, Rational::new(5, 18));
        assert_eq!(v.eps, Some(Rational::new(1, 18)));
        assert_eq!(cyclic_relevant_relators(&pres(&["ab", "abb", "a"]).relators).len(), 1);
    }

    #[test]
    fn cyclic_witnesses_replay() {
        let mut rng = relator_rng(12, 0);
        for _ in 0..20 {
            let rels: Vec<Word> = (0..6).map(|_| sample_reduced(&ab(), 4, &mut rng)).collect();
            let p = Presentation::new(ab(), rels).unwrap();
            let v = fa_certificate_cyclic(&p);
            if v.status == Status::NotCertified {
                assert!(v.witness_is_valid(&p.relators));
            }
        }
    }
}
