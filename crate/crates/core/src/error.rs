use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("alphabet must have at least {min} generators, got {got}")]
    AlphabetTooSmall { min: u32, got: u32 },
    #[error("letter index {index} out of range for alphabet of size {size}")]
    LetterOutOfRange { index: u32, size: u32 },
    #[error("cannot parse letter {0:?}")]
    BadLetter(char),
    #[error("letter text encoding supports at most 26 generators, alphabet has {0}")]
    AlphabetNotTextual(u32),
    #[error("the empty word belongs to no automaton language")]
    EmptyWord,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("relator count exceeds the budget of {budget}")]
    RelatorBudget { budget: u64 },
    #[error("enumeration over {bits} bits of automaton state exceeds the budget of {budget} bits")]
    EnumerationBudget { bits: u32, budget: u32 },
    #[error("alphabet mismatch: expected {expected} letters, got {got}")]
    AlphabetMismatch { expected: u32, got: u32 },
    #[error("word length {len} is not divisible by block length {block}")]
    NotDivisible { len: usize, block: usize },
    #[error("block {0} of the word is not reduced")]
    NonReducedBlock(usize),
    #[error("relators have mixed lengths {0} and {1}")]
    MixedLengths(usize, usize),
    #[error("weight function has no positive letters")]
    NoPositiveLetters,
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
