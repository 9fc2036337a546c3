//! Re-reading words over `S` as words over the alphabet `Ŝ` of reduced
//! length-`B` blocks, and counting the `S`-words whose block words an
//! automaton over `Ŝ` accepts.
//!
//! Block letters `0..n̂` are the blocks that are lexicographically smaller
//! (by letter index) than their inverse, in increasing order; letter `i + n̂`
//! is the inverse block of letter `i`. This matches the letter layout of
//! [`Alphabet`], so automata over `Ŝ` are ordinary automata over `Alphabet::new(n̂)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::automata::{BAutomaton, EAutomaton};
use crate::error::{Error, Result};
use crate::letterset::LetterSet;
use crate::words::{Alphabet, Letter, Presentation, Word};
use crate::Rational;

/// Largest block alphabet (`2n̂` letters) that will be tabulated.
pub const DEFAULT_BLOCK_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAlphabet {
    base: Alphabet,
    block_len: usize,
    hat: Alphabet,
    words: Vec<Word>,
    index: BTreeMap<Word, Letter>,
    first: Vec<Letter>,
    last: Vec<Letter>,
}

/// `n(2n−1)^{B−1}`, or `None` on overflow.
pub fn block_rank(n: u32, block_len: usize) -> Option<u64> {
    let mut acc = n as u64;
    for _ in 1..block_len {
        acc = acc.checked_mul(2 * n as u64 - 1)?;
    }
    Some(acc)
}

fn reduced_words(alphabet: &Alphabet, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur: Vec<Letter> = Vec::with_capacity(len);
    fn rec(alphabet: &Alphabet, len: usize, cur: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word(cur.clone()));
            return;
        }
        for l in alphabet.letters() {
            if cur.last().is_some_and(|&p| alphabet.inv(p) == l) {
                continue;
            }
            cur.push(l);
            rec(alphabet, len, cur, out);
            cur.pop();
        }
    }
    rec(alphabet, len, &mut cur, &mut out);
    out
}

impl BlockAlphabet {
    pub fn new(base: Alphabet, block_len: usize) -> Result<Self> {
        Self::with_budget(base, block_len, DEFAULT_BLOCK_BUDGET)
    }

    /// Fails when `2n̂` exceeds `budget` letters.
    pub fn with_budget(base: Alphabet, block_len: usize, budget: u64) -> Result<Self> {
        if base.rank() < 2 {
            return Err(Error::AlphabetTooSmall { min: 2, got: base.rank() });
        }
        if block_len < 2 {
            return Err(Error::InvalidParameter(format!("block length must be at least 2, got {block_len}")));
        }
        let n_hat = block_rank(base.rank(), block_len)
            .filter(|&k| k.checked_mul(2).is_some_and(|m| m <= budget) && k <= u32::MAX as u64)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "block alphabet for n = {}, B = {block_len} exceeds the budget of {budget} letters",
                    base.rank()
                ))
            })? as u32;
        let positive: Vec<Word> =
            reduced_words(&base, block_len).into_iter().filter(|w| *w < w.inverse(&base)).collect();
        debug_assert_eq!(positive.len(), n_hat as usize);
        let mut words = positive.clone();
        words.extend(positive.iter().map(|w| w.inverse(&base)));
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), Letter(i as u32))).collect();
        let first = words.iter().map(|w| w.first().expect("blocks are nonempty")).collect();
        let last = words.iter().map(|w| w.last().expect("blocks are nonempty")).collect();
        Ok(BlockAlphabet { base, block_len, hat: Alphabet::new(n_hat)?, words, index, first, last })
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// The alphabet `Ŝ^±` as an alphabet of rank `n̂`.
    pub fn hat(&self) -> &Alphabet {
        &self.hat
    }

    pub fn n_hat(&self) -> u32 {
        self.hat.rank()
    }

    pub fn block(&self, l: Letter) -> &Word {
        &self.words[l.index()]
    }

    pub fn letter_of(&self, block: &Word) -> Option<Letter> {
        self.index.get(block).copied()
    }

    pub fn first_letter(&self, l: Letter) -> Letter {
        self.first[l.index()]
    }

    pub fn last_letter(&self, l: Letter) -> Letter {
        self.last[l.index()]
    }

    /// Cuts `w` into consecutive length-`B` blocks.
    pub fn associate_word(&self, w: &Word) -> Result<Word> {
        self.base.check_word(w)?;
        if !w.len().is_multiple_of(self.block_len) {
            return Err(Error::NotDivisible { len: w.len(), block: self.block_len });
        }
        w.letters()
            .chunks(self.block_len)
            .enumerate()
            .map(|(i, chunk)| self.letter_of(&Word(chunk.to_vec())).ok_or(Error::NonReducedBlock(i)))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Concatenates the blocks of a word over `Ŝ`.
    pub fn de_block(&self, w: &Word) -> Result<Word> {
        self.hat.check_word(w)?;
        Ok(Word(w.iter().flat_map(|&l| self.block(l).iter().copied()).collect()))
    }

    pub fn format_letter(&self, l: Letter) -> Result<String> {
        self.hat.check(l)?;
        Ok(format!("[{}]", self.base.format_word(self.block(l))?))
    }

    pub fn format_word(&self, w: &Word) -> Result<String> {
        w.iter().map(|&l| self.format_letter(l)).collect()
    }

    /// Parses bracketed blocks such as `[ab][aB]`; whitespace between blocks is ignored.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut out = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('[')
                .and_then(|r| r.split_once(']'))
                .ok_or_else(|| Error::InvalidParameter(format!("expected a bracketed block in {s:?}")))?;
            let block = self.base.parse_word(body.0)?;
            let letter = self
                .letter_of(&block)
                .ok_or_else(|| Error::InvalidParameter(format!("[{}] is not a block letter", body.0)))?;
            out.push(letter);
            rest = body.1.trim_start();
        }
        Ok(Word(out))
    }

    /// `ρ^s`: block letters whose first letter is `s⁻¹`.
    pub fn rho_letter_set(&self, s: Letter) -> LetterSet {
        let target = self.base.inv(s);
        LetterSet::from_letters(self.hat.size(), self.hat.letters().filter(|&l| self.first[l.index()] == target))
    }

    /// `A^red`: `σ_∅` unchanged, each `σ_ŝ` minus the blocks that would
    /// cancel against the last letter of `ŝ`.
    pub fn build_reduced_subautomaton(&self, a: &BAutomaton) -> Result<BAutomaton> {
        self.check_automaton(a.alphabet())?;
        let sigma =
            self.hat.letters().map(|s| a.sigma(s).difference(&self.rho_letter_set(self.last_letter(s)))).collect();
        BAutomaton::new(self.hat, a.sigma_empty().clone(), sigma)
    }

    /// `A^{ŝ,s}`: `A` with `σ_∅` replaced by `σ_ŝ ∖ ρ^s`.
    pub fn build_suffix_automaton(&self, a: &BAutomaton, s_hat: Letter, s: Letter) -> Result<BAutomaton> {
        self.check_automaton(a.alphabet())?;
        self.hat.check(s_hat)?;
        self.base.check(s)?;
        let mut out = a.clone();
        out.set_sigma_empty(a.sigma(s_hat).difference(&self.rho_letter_set(s)));
        Ok(out)
    }

    fn check_automaton(&self, alphabet: &Alphabet) -> Result<()> {
        if *alphabet != self.hat {
            return Err(Error::AlphabetMismatch { expected: self.hat.size(), got: alphabet.size() });
        }
        Ok(())
    }

    /// Dynamic programming over `(first S-letter, last block)` for block words
    /// of length `len_hat` that start in `start`, step with `inner`, and close
    /// the last pair with `last`. Junctions must not cancel when `reduced`.
    /// Each surviving word contributes `weight(first, last block)`.
    fn block_dp(
        &self,
        start: &LetterSet,
        inner: &[LetterSet],
        last: &[LetterSet],
        len_hat: usize,
        reduced: bool,
        weight: impl Fn(Letter, Letter) -> BigUint,
    ) -> BigUint {
        if len_hat == 0 {
            return BigUint::zero();
        }
        let m = self.hat.size() as usize;
        let states = self.base.size() as usize * m;
        let mut layer = vec![BigUint::zero(); states];
        for l in start.iter() {
            layer[self.first[l.index()].index() * m + l.index()] = BigUint::one();
        }
        for step in 1..len_hat {
            let sets = if step + 1 == len_hat { last } else { inner };
            let mut next = vec![BigUint::zero(); states];
            for (state, c) in layer.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (f, blk) = (state / m, state % m);
                let forbidden = self.base.inv(self.last[blk]);
                for t in sets[blk].iter() {
                    if reduced && self.first[t.index()] == forbidden {
                        continue;
                    }
                    next[f * m + t.index()] += c;
                }
            }
            layer = next;
        }
        let mut total = BigUint::zero();
        for (state, c) in layer.iter().enumerate() {
            if !c.is_zero() {
                total += c * weight(Letter((state / m) as u32), Letter((state % m) as u32));
            }
        }
        total
    }

    fn len_hat(&self, len: usize) -> Result<usize> {
        if !len.is_multiple_of(self.block_len) {
            return Err(Error::NotDivisible { len, block: self.block_len });
        }
        Ok(len / self.block_len)
    }

    /// Number of length-`len` words over `S` whose block word is accepted by
    /// `e`: all such words (`Any`), the reduced ones, or the cyclically reduced ones.
    pub fn count_language_over_s_e(&self, e: &EAutomaton, len: usize, mode: CountMode) -> Result<BigUint> {
        self.check_automaton(e.alphabet())?;
        let len_hat = self.len_hat(len)?;
        let base = e.base();
        let inv = |l| self.base.inv(l);
        Ok(self.block_dp(base.sigma_empty(), base.sigmas(), e.taus(), len_hat, mode != CountMode::Any, |f, blk| {
            if mode == CountMode::CyclicallyReduced && self.last[blk.index()] == inv(f) {
                BigUint::zero()
            } else {
                BigUint::one()
            }
        }))
    }

    /// As [`Self::count_language_over_s_e`] for a b-automaton.
    pub fn count_language_over_s(&self, a: &BAutomaton, len: usize, mode: CountMode) -> Result<BigUint> {
        self.count_language_over_s_e(&a.promote_to_e(), len, mode)
    }

    /// Reduced words of length `len ≡ P (mod B)` whose length-`(len − P)`
    /// prefix has its block word accepted by `a`; with `cyclic`, only the
    /// cyclically reduced ones.
    pub fn count_prefix_set(&self, a: &BAutomaton, p: usize, len: usize, cyclic: bool) -> Result<BigUint> {
        self.check_automaton(a.alphabet())?;
        if p == 0 || p >= self.block_len || len <= p {
            return Err(Error::InvalidParameter(format!("need 1 <= P < B and L > P, got P = {p}, L = {len}")));
        }
        let len_hat = self.len_hat(len - p)?;
        Ok(self.block_dp(a.sigma_empty(), a.sigmas(), a.sigmas(), len_hat, true, |f, blk| {
            let forbid_end = if cyclic { Some(self.base.inv(f)) } else { None };
            count_extensions(&self.base, self.last[blk.index()], forbid_end, p)
        }))
    }

    /// Words `v·u` with `u` a word of length `len − P` whose block word is
    /// accepted by `A^{ŝ,s}` (`s` the last letter of `v`), all reduced; with
    /// `cyclic`, `e` closes the last block pair and only cyclically reduced
    /// words count.
    pub fn count_suffix_set(
        &self,
        e: &EAutomaton,
        s_hat: Letter,
        v: &Word,
        len: usize,
        cyclic: bool,
    ) -> Result<BigUint> {
        self.check_automaton(e.alphabet())?;
        self.base.check_word(v)?;
        let p = v.len();
        if p == 0 || p >= self.block_len || len <= p || !v.is_reduced(&self.base) {
            return Err(Error::InvalidParameter(format!(
                "need a reduced v with 1 <= |v| < B and L > |v|, got |v| = {p}, L = {len}"
            )));
        }
        let len_hat = self.len_hat(len - p)?;
        let s = v.last().expect("v is nonempty");
        let base = self.build_suffix_automaton(e.base(), s_hat, s)?;
        let last = if cyclic { e.taus() } else { base.sigmas() };
        let v_first = v.first().expect("v is nonempty");
        Ok(self.block_dp(base.sigma_empty(), base.sigmas(), last, len_hat, true, |_, blk| {
            if cyclic && self.last[blk.index()] == self.base.inv(v_first) {
                BigUint::zero()
            } else {
                BigUint::one()
            }
        }))
    }

    /// Blocks in `τ_ŝ` (`ŝ` the last block of `w`) that extend `w` to a
    /// cyclically reduced word: not starting with the inverse of `w`'s last
    /// letter, not ending with the inverse of `w`'s first letter.
    pub fn admissible_extensions(&self, w: &Word, e: &EAutomaton) -> Result<Vec<Letter>> {
        self.check_automaton(e.alphabet())?;
        let blocks = self.associate_word(w)?;
        let (Some(s_hat), Some(first), Some(last)) = (blocks.last(), w.first(), w.last()) else {
            return Err(Error::EmptyWord);
        };
        Ok(e.tau(s_hat)
            .iter()
            .filter(|&t| self.first[t.index()] != self.base.inv(last) && self.last[t.index()] != self.base.inv(first))
            .collect())
    }

    /// `w·v` for the first admissible block `v`.
    pub fn extend_to_cyclic(&self, w: &Word, e: &EAutomaton) -> Result<Word> {
        if !e.base().accepts(&self.associate_word(w)?)? {
            return Err(Error::Precondition(String::from("block word is not accepted by the base automaton")));
        }
        let v = self
            .admissible_extensions(w, e)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Precondition(String::from("no admissible final block")))?;
        Ok(w.concat(self.block(v)))
    }

    /// Over all letter pairs `(s, s′)`, the largest fraction of blocks that
    /// begin with `s` or end with `s′`, and whether it is at most `1/2 − 1/18`.
    pub fn sublemma_epsilon_check(&self) -> (Rational, bool) {
        let m = self.hat.size() as usize;
        let mut max = 0usize;
        for s in self.base.letters() {
            for t in self.base.letters() {
                let c = (0..m).filter(|&i| self.first[i] == s || self.last[i] == t).count();
                max = max.max(c);
            }
        }
        let ratio = Rational::new(max as i64, m as i64);
        (ratio, ratio <= Rational::new(1, 2) - crate::certificate::EPS0)
    }

    /// The block presentation of `p`. With `P = L mod B = 0` every relator is
    /// cut into blocks. Otherwise every ordered pair `(r₁, r₂)`, including
    /// `r₁ = r₂`, with `r₁ = q₁v⁻¹` and `r₂ = vq₂` for `|v| = P` contributes
    /// the block word of `q₁q₂`.
    pub fn associated_presentation(&self, p: &Presentation) -> Result<BlockEncodedPresentation> {
        if p.alphabet != self.base {
            return Err(Error::AlphabetMismatch { expected: self.base.size(), got: p.alphabet.size() });
        }
        let len = p.uniform_length()?.unwrap_or(0);
        let offset = len % self.block_len;
        let mut relators = Vec::new();
        let mut pairing_log = Vec::new();
        if offset == 0 {
            for r in &p.relators {
                relators.push(self.associate_word(r)?);
            }
        } else {
            let mut by_prefix: BTreeMap<&[Letter], Vec<usize>> = BTreeMap::new();
            for (j, r) in p.relators.iter().enumerate() {
                by_prefix.entry(&r.letters()[..offset]).or_default().push(j);
            }
            for (i, r1) in p.relators.iter().enumerate() {
                let (q1, tail) = r1.letters().split_at(len - offset);
                let v = Word(tail.to_vec()).inverse(&self.base);
                for &j in by_prefix.get(v.letters()).map(Vec::as_slice).unwrap_or(&[]) {
                    let q2 = &p.relators[j].letters()[offset..];
                    let joined = Word([q1, q2].concat());
                    relators.push(self.associate_word(&joined)?);
                    pairing_log.push(Pairing { first: i, second: j, v: v.clone() });
                }
            }
        }
        Ok(BlockEncodedPresentation { presentation: Presentation::new(self.hat, relators)?, offset, pairing_log })
    }
}

/// Reduced words of length `p` that may follow `prev` and, if given, do
/// not end in `forbid_end`.
fn count_extensions(alphabet: &Alphabet, prev: Letter, forbid_end: Option<Letter>, p: usize) -> BigUint {
    let m = alphabet.size() as usize;
    let mut layer = vec![BigUint::zero(); m];
    layer[prev.index()] = BigUint::one();
    for _ in 0..p {
        let mut next = vec![BigUint::zero(); m];
        for (s, c) in layer.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let forbidden = alphabet.inv(Letter(s as u32));
            for t in alphabet.letters().filter(|&t| t != forbidden) {
                next[t.index()] += c;
            }
        }
        layer = next;
    }
    layer.iter().enumerate().filter(|&(t, _)| forbid_end != Some(Letter(t as u32))).map(|(_, c)| c).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMode {
    Any,
    Reduced,
    CyclicallyReduced,
}

/// One contributing pair `(r₁, r₂)`, by relator index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pairing {
    pub first: usize,
    pub second: usize,
    pub v: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEncodedPresentation {
    /// `⟨Ŝ | R̂⟩`; relators are kept as built, possibly unreduced.
    pub presentation: Presentation,
    /// `P = L mod B`.
    pub offset: usize,
    /// Empty when `P = 0`; otherwise one entry per relator, in order.
    pub pairing_log: Vec<Pairing>,
}

impl BlockEncodedPresentation {
    /// The relators freely reduced over `Ŝ`.
    pub fn reduced_relators(&self) -> Vec<Word> {
        let hat = self.presentation.alphabet;
        self.presentation.relators.iter().map(|r| r.free_reduce(&hat)).collect()
    }
}
