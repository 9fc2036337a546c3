use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::words::Letter;

/// A subset of a symmetrized alphabet, stored as a bitset in letter-index order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LetterSet {
    size: u32,
    bits: Vec<u64>,
}

impl LetterSet {
    pub fn empty(size: u32) -> Self {
        LetterSet { size, bits: vec![0; (size as usize).div_ceil(64)] }
    }

    pub fn full(size: u32) -> Self {
        let mut s = Self::empty(size);
        for i in 0..size {
            s.insert(Letter(i));
        }
        s
    }

    /// Builds a set from the low `size` bits of `mask` (`size ≤ 64`).
    pub fn from_mask(size: u32, mask: u64) -> Self {
        assert!(size <= 64);
        let mut s = Self::empty(size);
        if size > 0 {
            let keep = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
            s.bits[0] = mask & keep;
        }
        s
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(size: u32, letters: I) -> Self {
        let mut s = Self::empty(size);
        for l in letters {
            s.insert(l);
        }
        s
    }

    /// Capacity of the underlying alphabet.
    pub fn universe(&self) -> u32 {
        self.size
    }

    #[inline]
    pub fn contains(&self, l: Letter) -> bool {
        let i = l.0 as usize;
        l.0 < self.size && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, l: Letter) -> bool {
        assert!(l.0 < self.size, "letter {} outside alphabet of size {}", l.0, self.size);
        let i = l.0 as usize;
        let was = self.contains(l);
        self.bits[i / 64] |= 1 << (i % 64);
        !was
    }

    pub fn remove(&mut self, l: Letter) -> bool {
        if !self.contains(l) {
            return false;
        }
        let i = l.0 as usize;
        self.bits[i / 64] &= !(1 << (i % 64));
        true
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.size).map(Letter).filter(move |&l| self.contains(l))
    }

    pub fn union(&self, other: &LetterSet) -> LetterSet {
        debug_assert_eq!(self.size, other.size);
        LetterSet { size: self.size, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect() }
    }

    pub fn difference(&self, other: &LetterSet) -> LetterSet {
        debug_assert_eq!(self.size, other.size);
        LetterSet { size: self.size, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect() }
    }

    pub fn intersection(&self, other: &LetterSet) -> LetterSet {
        debug_assert_eq!(self.size, other.size);
        LetterSet { size: self.size, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() }
    }

    pub fn is_subset(&self, other: &LetterSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}
