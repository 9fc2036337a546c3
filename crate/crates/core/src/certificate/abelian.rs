//! Epimorphisms onto the integers: the weight-function automaton and the
//! exponent-sum rank test.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::automata::BAutomaton;
use crate::error::{Error, Result};
use crate::letterset::LetterSet;
use crate::words::{Alphabet, Letter, Presentation};

/// Integer weight `ψ` per generator; a letter's weight is `±ψ` by orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    pub psi: Vec<i64>,
}

impl WeightFunction {
    pub fn new(psi: Vec<i64>) -> Self {
        WeightFunction { psi }
    }

    pub fn letter_weight(&self, alphabet: &Alphabet, l: Letter) -> i64 {
        let w = self.psi[alphabet.base(l) as usize];
        if alphabet.is_positive(l) {
            w
        } else {
            -w
        }
    }

    pub fn word_weight(&self, alphabet: &Alphabet, w: &crate::words::Word) -> i64 {
        w.iter().map(|&l| self.letter_weight(alphabet, l)).sum()
    }

    /// `S_+`: letters of positive weight.
    pub fn positive(&self, alphabet: &Alphabet) -> LetterSet {
        LetterSet::from_letters(alphabet.size(), alphabet.letters().filter(|&l| self.letter_weight(alphabet, l) > 0))
    }

    /// `S_0`: letters of weight zero.
    pub fn neutral(&self, alphabet: &Alphabet) -> LetterSet {
        LetterSet::from_letters(alphabet.size(), alphabet.letters().filter(|&l| self.letter_weight(alphabet, l) == 0))
    }
}

/// `σ_∅ = S_+` and `σ_s = S_+ ∪ S_0`: every accepted word has positive weight.
/// The automaton is 1/2-large because `|S_+ ∪ S_0| ≥ n`.
pub fn epimorphism_automaton(alphabet: Alphabet, psi: &WeightFunction) -> Result<BAutomaton> {
    if psi.psi.len() != alphabet.rank() as usize {
        return Err(Error::AlphabetMismatch { expected: alphabet.rank(), got: psi.psi.len() as u32 });
    }
    let plus = psi.positive(&alphabet);
    if plus.is_empty() {
        return Err(Error::NoPositiveLetters);
    }
    let step = plus.union(&psi.neutral(&alphabet));
    BAutomaton::new(alphabet, plus, alloc::vec![step; alphabet.size() as usize])
}

/// Rank over `Q` of the `|R| × n` exponent-sum matrix, by fraction-free
/// (Bareiss) elimination.
#[allow(clippy::needless_range_loop)]
pub fn exponent_sum_rank(p: &Presentation) -> usize {
    let alphabet = &p.alphabet;
    let n = alphabet.rank() as usize;
    let mut rows: Vec<Vec<BigInt>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = alloc::vec![BigInt::zero(); n];
            for &l in r.iter() {
                let g = alphabet.base(l) as usize;
                if alphabet.is_positive(l) {
                    row[g] += 1;
                } else {
                    row[g] -= 1;
                }
            }
            row
        })
        .collect();
    let mut rank = 0;
    let mut prev_pivot = BigInt::from(1);
    for col in 0..n {
        let Some(pivot_row) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col].clone();
        for i in rank + 1..rows.len() {
            let factor = rows[i][col].clone();
            for j in col..n {
                let v = (&pivot * &rows[i][j] - &factor * &rows[rank][j]) / &prev_pivot;
                rows[i][j] = v;
            }
        }
        prev_pivot = pivot.abs();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Whether the presented group maps onto `Z`: exponent-sum rank below `n`.
pub fn admits_z_epimorphism(p: &Presentation) -> bool {
    exponent_sum_rank(p) < p.alphabet.rank() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn pres(n: u32, words: &[&str]) -> Presentation {
        let a = Alphabet::new(n).unwrap();
        Presentation::new(a, words.iter().map(|w| a.parse_word(w).unwrap()).collect()).unwrap()
    }

    #[test]
    fn epimorphism_examples() {
        assert!(admits_z_epimorphism(&pres(2, &["ab"])));
        assert!(!admits_z_epimorphism(&pres(2, &["a", "b"])));
        assert!(admits_z_epimorphism(&pres(2, &[])));
        assert!(admits_z_epimorphism(&pres(2, &["abAB"])));
        assert!(!admits_z_epimorphism(&pres(2, &["aab", "abbb"])));
        assert!(admits_z_epimorphism(&pres(3, &["ab", "bc", "ac"].map(|_| "aBc"))));
        assert_eq!(exponent_sum_rank(&pres(3, &["aab", "bbc", "cca", "abc"])), 3);
    }

    /// Rank by exhaustive search for a nonzero integer kernel vector in a box.
    fn has_small_kernel_vector(p: &Presentation, bound: i64) -> bool {
        let n = p.alphabet.rank() as usize;
        let mut v = alloc::vec![-bound; n];
        loop {
            if v.iter().any(|&x| x != 0) {
                let psi = WeightFunction::new(v.clone());
                if p.relators.iter().all(|r| psi.word_weight(&p.alphabet, r) == 0) {
                    return true;
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                v[i] += 1;
                if v[i] <= bound {
                    break;
                }
                v[i] = -bound;
                i += 1;
            }
        }
    }

    #[test]
    fn rank_matches_kernel_search() {
        let mut rng = crate::words::relator_rng(21, 0);
        for _ in 0..150 {
            let a = Alphabet::new(2).unwrap();
            let k = rand::Rng::gen_range(&mut rng, 0..3);
            let rels: Vec<Word> = (0..k).map(|_| crate::words::sample_reduced(&a, 3, &mut rng)).collect();
            let p = Presentation::new(a, rels).unwrap();
            // Exponent sums are at most 3, so a kernel vector exists in [-3,3]^2 when one exists.
            assert_eq!(admits_z_epimorphism(&p), has_small_kernel_vector(&p, 3), "{:?}", p.relators);
        }
    }

    #[test]
    fn weight_automaton_construction() {
        let a = Alphabet::new(2).unwrap();
        let auto = epimorphism_automaton(a, &WeightFunction::new(alloc::vec![1, 0])).unwrap();
        let set = |s: &str| LetterSet::from_letters(4, a.parse_word(s).unwrap().0);
        assert_eq!(auto.sigma_empty(), &set("a"));
        for l in a.letters() {
            assert_eq!(auto.sigma(l), &set("abB"));
        }
        assert!(auto.is_lambda_large(crate::Rational::new(1, 2)));
        assert_eq!(epimorphism_automaton(a, &WeightFunction::new(alloc::vec![0, 0])), Err(Error::NoPositiveLetters));
        // Negative weight makes the inverse letter positive.
        let neg = epimorphism_automaton(a, &WeightFunction::new(alloc::vec![0, -2])).unwrap();
        assert_eq!(neg.sigma_empty(), &set("B"));
    }
}
