//! File formats, Monte Carlo experiments and the command line for
//! [`randfa_core`].

pub mod cli;
pub mod experiments;
pub mod formats;
