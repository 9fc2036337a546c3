//! Automaton-based certificates for property (FA) of random groups in the
//! Gromov density model.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line tool and the Monte Carlo driver live in the `randfa` crate.
#![no_std]
extern crate alloc;
#[cfg(test)]
#[macro_use]
extern crate std;

pub mod automata;
pub mod blocks;
pub mod certificate;
pub mod error;
pub mod letterset;
pub mod pipeline;
pub mod splittings;
pub mod words;

pub use automata::{BAutomaton, EAutomaton};
pub use error::{Error, Result};
pub use letterset::LetterSet;
pub use words::{parse_rational, Alphabet, Letter, Model, ModelParams, Presentation, Word};

/// Exact rational parameters (densities, largeness constants).
pub type Rational = num_rational::Ratio<i64>;
