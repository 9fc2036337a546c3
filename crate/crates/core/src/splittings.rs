//! Free products `A ∗ B` of free groups (trivial amalgam), generator
//! assignments into them, and the automata built from such assignments.
//!
//! Factor `A` is free on `rank_a` generators and `B` on `rank_b`. In text,
//! `A` owns the first `rank_a` lowercase letters and `B` the next `rank_b`;
//! uppercase is the inverse and `x^k` a power, so `"a b^2 A"` is `a·b²·a⁻¹`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::automata::{BAutomaton, EAutomaton};
use crate::error::{Error, Result};
use crate::letterset::LetterSet;
use crate::words::{Alphabet, Letter, Word};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    A,
    B,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::A => Factor::B,
            Factor::B => Factor::A,
        }
    }
}

/// A nontrivial element of one factor, as a reduced word over that factor's generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub factor: Factor,
    pub element: Word,
}

/// An element of `A ∗ B` in reduced form: alternating factors, no trivial
/// syllables. The empty sequence is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyllableWord {
    syllables: Vec<Syllable>,
}

/// The two free factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeProduct {
    pub a: Alphabet,
    pub b: Alphabet,
}

impl FreeProduct {
    pub fn new(rank_a: u32, rank_b: u32) -> Result<Self> {
        if rank_a + rank_b > 26 {
            return Err(Error::AlphabetNotTextual(rank_a + rank_b));
        }
        Ok(FreeProduct { a: Alphabet::new(rank_a)?, b: Alphabet::new(rank_b)? })
    }

    pub fn factor(&self, f: Factor) -> &Alphabet {
        match f {
            Factor::A => &self.a,
            Factor::B => &self.b,
        }
    }

    /// The free group on the generators of both factors, into which the
    /// product embeds as an isomorphism (`A`'s generators first).
    pub fn flat_alphabet(&self) -> Alphabet {
        Alphabet::new(self.a.rank() + self.b.rank()).expect("ranks are positive")
    }

    pub fn syllable(&self, factor: Factor, element: Word) -> Result<SyllableWord> {
        let alphabet = self.factor(factor);
        alphabet.check_word(&element)?;
        Ok(self.normal_form(&[SyllableWord { syllables: vec![Syllable { factor, element }] }]))
    }

    pub fn generator(&self, factor: Factor, i: u32) -> SyllableWord {
        SyllableWord { syllables: vec![Syllable { factor, element: Word(vec![Letter(i)]) }] }
    }

    /// Product of `parts` in reduced form: adjacent syllables of one factor
    /// are multiplied and trivial results dropped, until none remain.
    pub fn normal_form(&self, parts: &[SyllableWord]) -> SyllableWord {
        let mut stack: Vec<Syllable> = Vec::new();
        for syl in parts.iter().flat_map(|p| p.syllables.iter()) {
            let alphabet = self.factor(syl.factor);
            let element = syl.element.free_reduce(alphabet);
            if element.is_empty() {
                continue;
            }
            match stack.last_mut() {
                Some(top) if top.factor == syl.factor => {
                    let merged = top.element.concat(&element).free_reduce(alphabet);
                    if merged.is_empty() {
                        stack.pop();
                    } else {
                        top.element = merged;
                    }
                }
                _ => stack.push(Syllable { factor: syl.factor, element }),
            }
        }
        SyllableWord { syllables: stack }
    }

    pub fn multiply(&self, x: &SyllableWord, y: &SyllableWord) -> SyllableWord {
        self.normal_form(&[x.clone(), y.clone()])
    }

    pub fn inverse(&self, g: &SyllableWord) -> SyllableWord {
        SyllableWord {
            syllables: g
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { factor: s.factor, element: s.element.inverse(self.factor(s.factor)) })
                .collect(),
        }
    }

    /// `g⁻¹ · x · g`.
    pub fn conjugate(&self, x: &SyllableWord, g: &SyllableWord) -> SyllableWord {
        self.normal_form(&[self.inverse(g), x.clone(), g.clone()])
    }

    /// Maps a factor letter to the flat alphabet.
    fn flat_letter(&self, factor: Factor, l: Letter) -> Letter {
        let fa = self.factor(factor);
        let offset = match factor {
            Factor::A => 0,
            Factor::B => self.a.rank(),
        };
        let flat_n = self.a.rank() + self.b.rank();
        let base = fa.base(l) + offset;
        if fa.is_positive(l) {
            Letter(base)
        } else {
            Letter(base + flat_n)
        }
    }

    /// The same element as a word in the flat free group.
    pub fn flatten(&self, g: &SyllableWord) -> Word {
        Word(g.syllables.iter().flat_map(|s| s.element.iter().map(move |&l| self.flat_letter(s.factor, l))).collect())
    }

    /// Reads a flat word back as a product of one-letter syllables (not reduced).
    pub fn unflatten(&self, w: &Word) -> SyllableWord {
        let flat = self.flat_alphabet();
        let syllables = w
            .iter()
            .map(|&l| {
                let base = flat.base(l);
                let (factor, fa, i) = if base < self.a.rank() {
                    (Factor::A, self.a, base)
                } else {
                    (Factor::B, self.b, base - self.a.rank())
                };
                let letter = if flat.is_positive(l) { Letter(i) } else { fa.inv(Letter(i)) };
                Syllable { factor, element: Word(vec![letter]) }
            })
            .collect();
        SyllableWord { syllables }
    }

    /// Parses the syllable text encoding; `"1"` or blank is the identity.
    pub fn parse(&self, text: &str) -> Result<SyllableWord> {
        let flat = self.flat_alphabet();
        let mut parts = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars == ['1'] {
            return Ok(SyllableWord::identity());
        }
        let mut i = 0;
        while i < chars.len() {
            let l = flat.parse_letter(chars[i])?;
            i += 1;
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let token: String = chars[start..i].iter().collect();
                exp = token
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad exponent {token:?} in {text:?}")))?;
            }
            let letter = if exp < 0 { flat.inv(l) } else { l };
            let one = self.unflatten(&Word(vec![letter]));
            for _ in 0..exp.unsigned_abs() {
                parts.push(one.clone());
            }
        }
        Ok(self.normal_form(&parts))
    }

    /// Formats `g` in the syllable text encoding, with runs as powers.
    pub fn format(&self, g: &SyllableWord) -> String {
        if g.is_identity() {
            return String::from("1");
        }
        let flat = self.flat_alphabet();
        let w = self.flatten(g);
        let mut out = String::new();
        let mut i = 0;
        while i < w.len() {
            let l = w.letters()[i];
            let mut j = i;
            while j < w.len() && w.letters()[j] == l {
                j += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            let positive = flat.letter_char(Letter(flat.base(l))).expect("flat alphabet is textual");
            match (flat.is_positive(l), j - i) {
                (true, 1) => out.push(positive),
                (false, 1) => out.push(positive.to_ascii_uppercase()),
                (true, k) => {
                    let _ = write!(out, "{positive}^{k}");
                }
                (false, k) => {
                    let _ = write!(out, "{positive}^-{k}");
                }
            }
            i = j;
        }
        out
    }
}

impl SyllableWord {
    pub fn identity() -> Self {
        SyllableWord::default()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of terms in the reduced form; the identity counts as one term.
    pub fn length(&self) -> usize {
        self.syllables.len().max(1)
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syllables.last()
    }
}

/// Where a generator's image lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterClass {
    /// In `A ∖ {1}`.
    InA,
    /// In `B ∖ {1}`.
    InB,
    /// Trivial.
    Trivial,
    /// Outside `A ∪ B`: two or more syllables.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub delta: usize,
    /// Class per generator.
    pub classes: Vec<LetterClass>,
}

/// A homomorphism from the free group on `S` to `A ∗ B`, one image per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingAssignment {
    pub alphabet: Alphabet,
    pub product: FreeProduct,
    images: Vec<SyllableWord>,
}

/// One of the `2n` automata of the reduction construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionAutomaton {
    /// The factor whose letters the transitions allow.
    pub side: Factor,
    /// The single start letter, a generator.
    pub start: Letter,
    pub automaton: BAutomaton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub words_checked: u64,
    /// First accepted word (in length-then-letter order) breaking the claim.
    pub counterexample: Option<Word>,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl SplittingAssignment {
    pub fn new(alphabet: Alphabet, product: FreeProduct, images: Vec<SyllableWord>) -> Result<Self> {
        if images.len() != alphabet.rank() as usize {
            return Err(Error::AlphabetMismatch { expected: alphabet.rank(), got: images.len() as u32 });
        }
        let images = images.iter().map(|g| product.normal_form(core::slice::from_ref(g))).collect();
        Ok(SplittingAssignment { alphabet, product, images })
    }

    /// Builds an assignment from one syllable string per generator.
    pub fn parse(alphabet: Alphabet, rank_a: u32, rank_b: u32, images: &[&str]) -> Result<Self> {
        let product = FreeProduct::new(rank_a, rank_b)?;
        let images = images.iter().map(|s| product.parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, product, images)
    }

    pub fn images(&self) -> &[SyllableWord] {
        &self.images
    }

    /// Image of a letter of `S^±`.
    pub fn image(&self, l: Letter) -> SyllableWord {
        let g = &self.images[self.alphabet.base(l) as usize];
        if self.alphabet.is_positive(l) {
            g.clone()
        } else {
            self.product.inverse(g)
        }
    }

    /// Image of a word, in reduced form.
    pub fn word_image(&self, w: &Word) -> SyllableWord {
        let parts: Vec<SyllableWord> = w.iter().map(|&l| self.image(l)).collect();
        self.product.normal_form(&parts)
    }

    pub fn total_length(&self) -> usize {
        self.images.iter().map(SyllableWord::length).sum()
    }

    pub fn class_of(&self, l: Letter) -> LetterClass {
        let g = &self.images[self.alphabet.base(l) as usize];
        match g.syllables() {
            [] => LetterClass::Trivial,
            [s] if s.factor == Factor::A => LetterClass::InA,
            [_] => LetterClass::InB,
            _ => LetterClass::Mixed,
        }
    }

    pub fn classify(&self) -> Classification {
        let classes: Vec<LetterClass> =
            (0..self.alphabet.rank()).map(|i| self.class_of(self.alphabet.generator(i))).collect();
        let count = |c| classes.iter().filter(|&&x| x == c).count();
        Classification {
            alpha: count(LetterClass::InA),
            beta: count(LetterClass::InB),
            gamma: count(LetterClass::Trivial),
            delta: count(LetterClass::Mixed),
            classes,
        }
    }

    /// Letters of `S^±` in the given class.
    pub fn class_letters(&self, class: LetterClass) -> LetterSet {
        LetterSet::from_letters(self.alphabet.size(), self.alphabet.letters().filter(|&l| self.class_of(l) == class))
    }

    /// Every image replaced by `g⁻¹ · image · g`.
    pub fn conjugate_assignment(&self, g: &SyllableWord) -> SplittingAssignment {
        SplittingAssignment {
            alphabet: self.alphabet,
            product: self.product,
            images: self.images.iter().map(|x| self.product.conjugate(x, g)).collect(),
        }
    }

    /// Distinct first syllables of the images of `S^±`, in letter order.
    fn first_syllables(&self) -> Vec<SyllableWord> {
        let mut out: Vec<SyllableWord> = Vec::new();
        for l in self.alphabet.letters() {
            if let Some(s) = self.image(l).first() {
                let g = SyllableWord { syllables: vec![s.clone()] };
                if !out.contains(&g) {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Greedy descent of the total image length under conjugation by single
    /// syllables that begin some image; each step takes the largest decrease
    /// (first such conjugator on ties) and stops at a local minimum.
    pub fn minimize_by_conjugation(&self) -> SplittingAssignment {
        let mut current = self.clone();
        loop {
            let total = current.total_length();
            let mut best: Option<(usize, SplittingAssignment)> = None;
            for g in current.first_syllables() {
                let next = current.conjugate_assignment(&g);
                let t = next.total_length();
                if t < total && best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                    best = Some((t, next));
                }
            }
            match best {
                Some((_, next)) => current = next,
                None => return current,
            }
        }
    }

    /// For each syllable `x` beginning the image of some mixed letter, the
    /// number of mixed letters in `S^±` whose image begins with `x` is at most
    /// `β+δ` when `x ∈ A` and `α+δ` when `x ∈ B`.
    pub fn check_minimality_bound(&self) -> bool {
        let c = self.classify();
        let firsts: Vec<Syllable> = self
            .alphabet
            .letters()
            .filter(|&l| self.class_of(l) == LetterClass::Mixed)
            .map(|l| self.image(l).first().expect("mixed images are nontrivial").clone())
            .collect();
        firsts.iter().all(|x| {
            let count = firsts.iter().filter(|y| *y == x).count();
            let bound = match x.factor {
                Factor::A => c.beta + c.delta,
                Factor::B => c.alpha + c.delta,
            };
            count <= bound
        })
    }

    /// Largeness `(α+γ)/n` of the `A`-side reduction automata and `(β+γ)/n` of the `B`-side ones.
    pub fn reduction_largeness(&self) -> (Rational, Rational) {
        let c = self.classify();
        let n = self.alphabet.rank() as i64;
        (Rational::new((c.alpha + c.gamma) as i64, n), Rational::new((c.beta + c.gamma) as i64, n))
    }

    /// The `2n` automata with `σ_∅ = {s′}` for a generator `s′` and every `σ_s`
    /// equal to `𝒜^± ∪ 𝒞^±` (`A` side, listed first) or `ℬ^± ∪ 𝒞^±` (`B` side).
    pub fn build_reduction_automata(&self) -> Vec<ReductionAutomaton> {
        let m = self.alphabet.size();
        let trivial = self.class_letters(LetterClass::Trivial);
        let mut out = Vec::with_capacity(m as usize);
        for (side, class) in [(Factor::A, LetterClass::InA), (Factor::B, LetterClass::InB)] {
            let step = self.class_letters(class).union(&trivial);
            for i in 0..self.alphabet.rank() {
                let start = self.alphabet.generator(i);
                let automaton =
                    BAutomaton::new(self.alphabet, LetterSet::from_letters(m, [start]), vec![step.clone(); m as usize])
                        .expect("sets built over the alphabet");
                out.push(ReductionAutomaton { side, start, automaton });
            }
        }
        out
    }

    /// Whether no accepted word of `r` should map to the identity: the start
    /// letter's image must be nontrivial and not lie in the automaton's own factor.
    pub fn reduction_applies(&self, r: &ReductionAutomaton) -> bool {
        let own = match r.side {
            Factor::A => LetterClass::InA,
            Factor::B => LetterClass::InB,
        };
        let class = self.class_of(r.start);
        class != own && class != LetterClass::Trivial
    }

    /// Largeness `min{δ+β, δ+α}/2n` that the main automaton attains when
    /// the minimality bound holds.
    pub fn main_largeness(&self) -> Rational {
        let c = self.classify();
        let k = (c.delta + c.beta).min(c.delta + c.alpha) as i64;
        Rational::new(k, 2 * self.alphabet.rank() as i64)
    }

    /// Mixed letters whose image does not begin with `x`.
    fn mixed_not_beginning_with(&self, x: &Syllable) -> LetterSet {
        LetterSet::from_letters(
            self.alphabet.size(),
            self.alphabet
                .letters()
                .filter(|&l| self.class_of(l) == LetterClass::Mixed && self.image(l).first() != Some(x)),
        )
    }

    fn inverse_syllable(&self, s: &Syllable) -> Syllable {
        Syllable { factor: s.factor, element: s.element.inverse(self.product.factor(s.factor)) }
    }

    /// The automaton whose accepted words have images that never cancel
    /// down: `σ_∅ = 𝒜^± ∪ ℬ^± ∪ 𝒟^±`; after a letter whose image ends in a
    /// syllable `x`, allow letters from the other factor and mixed letters
    /// whose image does not begin with `x⁻¹`; after a trivial letter allow everything.
    pub fn build_main_automaton(&self) -> BAutomaton {
        let m = self.alphabet.size();
        let in_a = self.class_letters(LetterClass::InA);
        let in_b = self.class_letters(LetterClass::InB);
        let mixed = self.class_letters(LetterClass::Mixed);
        let start = in_a.union(&in_b).union(&mixed);
        let sigma = self
            .alphabet
            .letters()
            .map(|s| {
                let image = self.image(s);
                let Some(last) = image.last() else { return LetterSet::full(m) };
                let other = match last.factor {
                    Factor::A => &in_b,
                    Factor::B => &in_a,
                };
                other.union(&self.mixed_not_beginning_with(&self.inverse_syllable(last)))
            })
            .collect();
        BAutomaton::new(self.alphabet, start, sigma).expect("sets built over the alphabet")
    }

    /// The main automaton with `τ_s = σ_s ∪ 𝒜^± ∪ ℬ^± ∪ 𝒞^±`.
    pub fn build_main_e_automaton(&self) -> EAutomaton {
        let base = self.build_main_automaton();
        let extra = self
            .class_letters(LetterClass::InA)
            .union(&self.class_letters(LetterClass::InB))
            .union(&self.class_letters(LetterClass::Trivial));
        let tau = base.sigmas().iter().map(|s| s.union(&extra)).collect();
        EAutomaton::new(base, tau).expect("sets built over the alphabet")
    }

    /// Checks, for every word of length `1..=max_len` accepted by the main
    /// automaton, that its image has at least as many syllables as the word
    /// has letters and ends with the last syllable of the last letter's image.
    pub fn verify_claim(&self, max_len: usize) -> Result<ClaimReport> {
        if !self.check_minimality_bound() {
            return Err(Error::Precondition(String::from("assignment violates the minimality bound")));
        }
        let automaton = self.build_main_automaton();
        let mut report = ClaimReport { words_checked: 0, counterexample: None };
        let mut frontier: Vec<(Word, SyllableWord)> =
            automaton.sigma_empty().iter().map(|l| (Word(vec![l]), self.image(l))).collect();
        for len in 1..=max_len {
            for (w, img) in &frontier {
                report.words_checked += 1;
                let last = w.last().expect("nonempty");
                if img.length() < len || img.last() != self.image(last).last() {
                    report.counterexample = Some(w.clone());
                    return Ok(report);
                }
            }
            if len == max_len {
                break;
            }
            frontier = frontier
                .iter()
                .flat_map(|(w, img)| {
                    let last = w.last().expect("nonempty");
                    automaton.sigma(last).iter().map(move |l| {
                        let mut next = w.clone();
                        next.0.push(l);
                        (next, self.product.multiply(img, &self.image(l)))
                    })
                })
                .collect();
        }
        Ok(report)
    }

    /// First word of length `min_len..=max_len` accepted by `automaton` whose
    /// image is trivial, in length-then-letter order.
    pub fn first_trivial_word(&self, automaton: &BAutomaton, min_len: usize, max_len: usize) -> Option<Word> {
        self.first_trivial_word_with(automaton, None, min_len, max_len)
    }

    /// As [`Self::first_trivial_word`], for an e-automaton.
    pub fn first_trivial_word_e(&self, automaton: &EAutomaton, min_len: usize, max_len: usize) -> Option<Word> {
        self.first_trivial_word_with(automaton.base(), Some(automaton.taus()), min_len, max_len)
    }

    fn first_trivial_word_with(
        &self,
        base: &BAutomaton,
        tau: Option<&[LetterSet]>,
        min_len: usize,
        max_len: usize,
    ) -> Option<Word> {
        // Words of the base language, with their images.
        let mut frontier: Vec<(Word, SyllableWord)> =
            base.sigma_empty().iter().map(|l| (Word(vec![l]), self.image(l))).collect();
        for len in 1..=max_len {
            if len >= min_len && (len == 1 || tau.is_none()) {
                if let Some((w, _)) = frontier.iter().find(|(_, g)| g.is_identity()) {
                    return Some(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            if let Some(tau) = tau {
                if len + 1 >= min_len {
                    for (w, img) in &frontier {
                        let last = w.last().expect("nonempty");
                        for l in tau[last.index()].iter() {
                            if self.product.multiply(img, &self.image(l)).is_identity() {
                                let mut next = w.clone();
                                next.0.push(l);
                                return Some(next);
                            }
                        }
                    }
                }
            }
            frontier = frontier
                .iter()
                .flat_map(|(w, img)| {
                    let last = w.last().expect("nonempty");
                    base.sigma(last).iter().map(move |l| {
                        let mut next = w.clone();
                        next.0.push(l);
                        (next, self.product.multiply(img, &self.image(l)))
                    })
                })
                .collect();
        }
        None
    }
}
