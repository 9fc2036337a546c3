//! Symmetrized alphabets, words over them, and the density-model sampler.
//!
//! Letters of an alphabet with `n` generators are indexed `0..2n`: index
//! `i < n` is the `i`-th generator and `i + n` its formal inverse. In text,
//! generators are written `a..z` and inverses `A..Z`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::Rational;

/// Index of a letter in a symmetrized alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The alphabet `S^±` of a free group of rank `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    n: u32,
}

impl Alphabet {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::AlphabetTooSmall { min: 1, got: n });
        }
        Ok(Alphabet { n })
    }

    /// Number of generators.
    pub fn rank(&self) -> u32 {
        self.n
    }

    /// Number of letters, `2n`.
    pub fn size(&self) -> u32 {
        2 * self.n
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.size()).map(Letter)
    }

    pub fn generator(&self, i: u32) -> Letter {
        debug_assert!(i < self.n);
        Letter(i)
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.0 < self.size()
    }

    pub fn is_positive(&self, l: Letter) -> bool {
        l.0 < self.n
    }

    /// The generator underlying a letter, ignoring orientation.
    pub fn base(&self, l: Letter) -> u32 {
        l.0 % self.n
    }

    /// Formal inverse of an in-range letter.
    #[inline]
    pub fn inv(&self, l: Letter) -> Letter {
        debug_assert!(self.contains(l));
        if l.0 < self.n {
            Letter(l.0 + self.n)
        } else {
            Letter(l.0 - self.n)
        }
    }

    /// Formal inverse, rejecting out-of-range letters.
    pub fn inverse_letter(&self, l: Letter) -> Result<Letter> {
        self.check(l)?;
        Ok(self.inv(l))
    }

    pub fn check(&self, l: Letter) -> Result<()> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { index: l.0, size: self.size() })
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.iter().try_for_each(|&l| self.check(l))
    }

    fn check_textual(&self) -> Result<()> {
        if self.n > 26 {
            Err(Error::AlphabetNotTextual(self.n))
        } else {
            Ok(())
        }
    }

    pub fn letter_char(&self, l: Letter) -> Result<char> {
        self.check_textual()?;
        self.check(l)?;
        let base = self.base(l) as u8;
        Ok(if self.is_positive(l) { (b'a' + base) as char } else { (b'A' + base) as char })
    }

    pub fn parse_letter(&self, c: char) -> Result<Letter> {
        self.check_textual()?;
        let (offset, inverse) = match c {
            'a'..='z' => (c as u32 - 'a' as u32, false),
            'A'..='Z' => (c as u32 - 'A' as u32, true),
            _ => return Err(Error::BadLetter(c)),
        };
        if offset >= self.n {
            return Err(Error::BadLetter(c));
        }
        Ok(Letter(if inverse { offset + self.n } else { offset }))
    }

    /// Parses the letter text encoding; whitespace is ignored.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| self.parse_letter(c)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn format_word(&self, w: &Word) -> Result<String> {
        w.iter().map(|&l| self.letter_char(l)).collect()
    }
}

/// A finite sequence of letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices(indices: &[u32]) -> Self {
        Word(indices.iter().map(|&i| Letter(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Letter> {
        self.0.iter()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self, alphabet: &Alphabet) -> Word {
        Word(self.0.iter().rev().map(|&l| alphabet.inv(l)).collect())
    }

    /// No adjacent pair `l, l^{-1}`.
    pub fn is_reduced(&self, alphabet: &Alphabet) -> bool {
        self.0.windows(2).all(|p| p[1] != alphabet.inv(p[0]))
    }

    pub fn is_cyclically_reduced(&self, alphabet: &Alphabet) -> bool {
        self.is_reduced(alphabet)
            && match (self.first(), self.last()) {
                (Some(f), Some(l)) if self.len() > 1 => l != alphabet.inv(f),
                _ => true,
            }
    }

    /// Free reduction, cancelling adjacent inverse pairs until none remain.
    pub fn free_reduce(&self, alphabet: &Alphabet) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&alphabet.inv(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

/// `⟨S | R⟩` with `R` an ordered multiset of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            alphabet.check_word(r)?;
        }
        Ok(Presentation { alphabet, relators })
    }

    pub fn n(&self) -> u32 {
        self.alphabet.rank()
    }

    /// Common relator length, or an error if lengths differ. `None` when there are no relators.
    pub fn uniform_length(&self) -> Result<Option<usize>> {
        let mut it = self.relators.iter().map(Word::len);
        let Some(first) = it.next() else { return Ok(None) };
        for l in it {
            if l != first {
                return Err(Error::MixedLengths(first, l));
            }
        }
        Ok(Some(first))
    }
}

/// Which word set relators are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Reduced,
    CyclicallyReduced,
}

/// Parameters of the density model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub n: u32,
    pub density: Rational,
    pub length: usize,
    pub model: Model,
    pub seed: u64,
}

/// Default ceiling on the number of relators a single sample may request.
pub const DEFAULT_RELATOR_BUDGET: u64 = 1 << 24;

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::AlphabetTooSmall { min: 2, got: self.n });
        }
        if self.n > 26 {
            return Err(Error::AlphabetNotTextual(self.n));
        }
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        if self.density <= zero || self.density >= one {
            return Err(Error::InvalidParameter(alloc::format!("density must lie in (0,1), got {}", self.density)));
        }
        if self.length == 0 {
            return Err(Error::InvalidParameter("relator length must be positive".into()));
        }
        Ok(())
    }

    /// `⌊(2n−1)^{dL}⌋`, computed exactly.
    pub fn relator_count(&self) -> Result<BigUint> {
        self.validate()?;
        Ok(density_count(self.n, self.density, self.length))
    }
}

/// Parses `"3/10"`, `"0.3"` or `"2"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(alloc::format!("cannot parse {s:?} as a rational number"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 17 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let negative = int.starts_with('-');
    let int_val: i64 = match int.trim_start_matches(['-', '+']) {
        "" if !frac.is_empty() => 0,
        digits if digits.chars().all(|c| c.is_ascii_digit()) => digits.parse().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int_val.checked_mul(den).and_then(|x| x.checked_add(frac_val)).ok_or_else(bad)?;
    Ok(Rational::new(if negative { -num } else { num }, den))
}

/// `⌊(2n−1)^{dL}⌋` for `d = p/q`: the largest `m` with `m^q ≤ (2n−1)^{pL}`.
pub fn density_count(n: u32, density: Rational, length: usize) -> BigUint {
    let p = *density.numer() as u64;
    let q = *density.denom() as u64;
    let base = BigUint::from(2 * n as u64 - 1);
    let exp = p * length as u64;
    let power = base.pow(exp as u32);
    power.nth_root(q as u32)
}

/// Number of reduced words of length `length`: `2n(2n−1)^{L−1}`, or 1 for `L = 0`.
pub fn count_reduced(n: u32, length: usize) -> BigUint {
    if length == 0 {
        return BigUint::one();
    }
    BigUint::from(2 * n as u64) * BigUint::from(2 * n as u64 - 1).pow(length as u32 - 1)
}

/// Uniform reduced word of the given length.
pub fn sample_reduced<R: Rng + ?Sized>(alphabet: &Alphabet, length: usize, rng: &mut R) -> Word {
    let size = alphabet.size();
    let mut letters = Vec::with_capacity(length);
    if length == 0 {
        return Word(letters);
    }
    let mut prev = Letter(rng.gen_range(0..size));
    letters.push(prev);
    for _ in 1..length {
        let forbidden = alphabet.inv(prev).0;
        let r = rng.gen_range(0..size - 1);
        prev = Letter(if r < forbidden { r } else { r + 1 });
        letters.push(prev);
    }
    Word(letters)
}

/// Uniform cyclically reduced word, by rejection from [`sample_reduced`].
pub fn sample_cyclically_reduced<R: Rng + ?Sized>(alphabet: &Alphabet, length: usize, rng: &mut R) -> Word {
    loop {
        let w = sample_reduced(alphabet, length, rng);
        if w.is_cyclically_reduced(alphabet) {
            return w;
        }
    }
}

pub fn sample_word<R: Rng + ?Sized>(alphabet: &Alphabet, length: usize, model: Model, rng: &mut R) -> Word {
    match model {
        Model::Reduced => sample_reduced(alphabet, length, rng),
        Model::CyclicallyReduced => sample_cyclically_reduced(alphabet, length, rng),
    }
}

/// Generator for relator `index` of a sample seeded by `seed`: ChaCha8 keyed by
/// the seed, with the relator index selecting the stream.
pub fn relator_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `⌊(2n−1)^{dL}⌋` relators i.i.d. (with replacement).
pub fn sample_relator_set(params: &ModelParams) -> Result<Presentation> {
    sample_relator_set_with_budget(params, DEFAULT_RELATOR_BUDGET)
}

pub fn sample_relator_set_with_budget(params: &ModelParams, budget: u64) -> Result<Presentation> {
    params.validate()?;
    // Bail out on the exponent before materializing an enormous power.
    if relator_count_bits(params.n, params.density, params.length) > 64 {
        return Err(Error::RelatorBudget { budget });
    }
    let count = params.relator_count()?;
    let count = match count.to_u64() {
        Some(c) if c <= budget => c,
        _ => return Err(Error::RelatorBudget { budget }),
    };
    let alphabet = Alphabet::new(params.n)?;
    let relators = (0..count)
        .map(|i| {
            let mut rng = relator_rng(params.seed, i);
            sample_word(&alphabet, params.length, params.model, &mut rng)
        })
        .collect();
    Ok(Presentation { alphabet, relators })
}

/// Integer upper bound on `log2 ⌊(2n−1)^{dL}⌋`.
fn relator_count_bits(n: u32, density: Rational, length: usize) -> u64 {
    let p = *density.numer() as u64;
    let q = *density.denom() as u64;
    let per_letter = 64 - (2 * n as u64 - 1).leading_zeros() as u64;
    (per_letter * p * length as u64).div_ceil(q)
}
