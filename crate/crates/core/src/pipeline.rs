//! From a presentation over `S` to a verdict about (FA): encode the
//! relators over the block alphabet and run the certificate there. A
//! certified block group passes (FA) down to the original group, since it
//! maps onto the finite-index subgroup generated by the length-`B` words.

use core::fmt;

use num_bigint::BigUint;

use crate::blocks::{BlockAlphabet, BlockEncodedPresentation};
use crate::certificate::{
    fa_certificate_cyclic_with, fa_certificate_with, CertificateOptions, CertificateVerdict, Status,
};
use crate::error::{Error, Result};
use crate::words::Presentation;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conclusion {
    HasFA,
    Inconclusive,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::HasFA => "G has property (FA)",
            Conclusion::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub block_len: usize,
    pub cyclic: bool,
    pub encoded: BlockEncodedPresentation,
    pub verdict: CertificateVerdict,
    pub conclusion: Conclusion,
}

/// Encodes `p` with blocks of length `block_len` and certifies the result,
/// with the e-automaton certificate when `cyclic`.
pub fn run_pipeline(
    p: &Presentation,
    block_len: usize,
    cyclic: bool,
    opts: CertificateOptions,
) -> Result<PipelineReport> {
    let blocks = BlockAlphabet::new(p.alphabet, block_len)?;
    run_pipeline_with(&blocks, p, cyclic, opts)
}

/// As [`run_pipeline`] with a prebuilt block alphabet.
pub fn run_pipeline_with(
    blocks: &BlockAlphabet,
    p: &Presentation,
    cyclic: bool,
    opts: CertificateOptions,
) -> Result<PipelineReport> {
    let encoded = blocks.associated_presentation(p)?;
    let verdict = if cyclic {
        fa_certificate_cyclic_with(&encoded.presentation, opts)
    } else {
        fa_certificate_with(&encoded.presentation, opts)
    };
    let conclusion = if verdict.status == Status::Certified { Conclusion::HasFA } else { Conclusion::Inconclusive };
    Ok(PipelineReport { block_len: blocks.block_len(), cyclic, encoded, verdict, conclusion })
}

fn split_density(density: Rational) -> Result<(u32, u32)> {
    let (p, q) = (*density.numer(), *density.denom());
    if p <= 0 || p >= q || q > u32::MAX as i64 {
        return Err(Error::InvalidParameter(alloc::format!("density must lie in (0,1), got {density}")));
    }
    Ok((p as u32, q as u32))
}

/// The constant `K` in the block-length condition `K^{1/B} < (2n−1)^d`:
/// 12 for reduced relators, `2/ε = 36` for cyclically reduced ones.
pub fn block_condition_constant(cyclic: bool) -> u32 {
    if cyclic {
        36
    } else {
        12
    }
}

/// Smallest admissible block length in each model.
pub fn min_block_len(cyclic: bool) -> usize {
    if cyclic {
        3
    } else {
        2
    }
}

/// `K^{1/B} < (2n−1)^d`, decided exactly as `K^q < (2n−1)^{pB}` for `d = p/q`.
pub fn block_condition_holds(n: u32, density: Rational, block_len: usize, cyclic: bool) -> Result<bool> {
    let (p, q) = split_density(density)?;
    let lhs = BigUint::from(block_condition_constant(cyclic)).pow(q);
    let exp = (p as u64)
        .checked_mul(block_len as u64)
        .filter(|&e| e <= u32::MAX as u64)
        .ok_or_else(|| Error::InvalidParameter(alloc::format!("exponent {p}·{block_len} too large")))?;
    let rhs = BigUint::from(2 * n as u64 - 1).pow(exp as u32);
    Ok(lhs < rhs)
}

/// The least admissible `B` satisfying [`block_condition_holds`].
pub fn minimal_block_len(n: u32, density: Rational, cyclic: bool) -> Result<usize> {
    if n < 2 {
        return Err(Error::AlphabetTooSmall { min: 2, got: n });
    }
    let mut b = min_block_len(cyclic);
    while !block_condition_holds(n, density, b, cyclic)? {
        b += 1;
    }
    Ok(b)
}

/// `(2n−1)^d ≥ 6`, when the certificate applies to the original alphabet
/// without blocks; decided as `(2n−1)^p ≥ 6^q`.
pub fn direct_condition_holds(n: u32, density: Rational) -> Result<bool> {
    let (p, q) = split_density(density)?;
    Ok(BigUint::from(2 * n as u64 - 1).pow(p) >= BigUint::from(6u32).pow(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, Word};
    use alloc::string::ToString;

    #[test]
    fn block_length_examples() {
        let d = Rational::new(2, 5);
        assert_eq!(minimal_block_len(2, d, false).unwrap(), 6);
        assert!(!block_condition_holds(2, d, 5, false).unwrap());
        // 12^{1/6} ≈ 1.513 < 3^{0.4} ≈ 1.552 < 12^{1/5} ≈ 1.644.
        let (lo, mid, hi) = (12f64.powf(1.0 / 6.0), 3f64.powf(0.4), 12f64.powf(0.2));
        assert!(lo < mid && mid < hi);
        assert!(direct_condition_holds(5, Rational::new(9, 10)).unwrap());
        assert!(!direct_condition_holds(2, Rational::new(9, 10)).unwrap());
        assert!(minimal_block_len(2, d, true).unwrap() >= 6);
        assert!(block_condition_holds(2, Rational::new(3, 2), 2, false).is_err());
    }

    #[test]
    fn minimal_block_len_is_least() {
        for n in 2..=4 {
            for (p, q) in [(1, 10), (1, 3), (1, 2), (4, 5)] {
                let d = Rational::new(p, q);
                for cyclic in [false, true] {
                    let b = minimal_block_len(n, d, cyclic).unwrap();
                    let k = block_condition_constant(cyclic) as f64;
                    let target = ((2 * n - 1) as f64).powf(p as f64 / q as f64);
                    assert!(k.powf(1.0 / b as f64) < target);
                    if b > min_block_len(cyclic) {
                        assert!(k.powf(1.0 / (b - 1) as f64) >= target);
                    }
                }
            }
        }
    }

    #[test]
    fn pipeline_conclusions() {
        let a = Alphabet::new(2).unwrap();
        let empty = Presentation::new(a, alloc::vec![]).unwrap();
        let r = run_pipeline(&empty, 2, false, CertificateOptions::default()).unwrap();
        assert_eq!(r.verdict.status, Status::NotCertified);
        assert_eq!(r.conclusion.to_string(), "inconclusive");
        assert!(r.verdict.witness_is_valid(&r.encoded.presentation.relators));

        // Every reduced word of length 4 as a relator: the block group has
        // every reduced length-2 word over Ŝ that de-blocks to a reduced word.
        let mut rels = alloc::vec![Word::empty()];
        for _ in 0..4 {
            rels = rels
                .into_iter()
                .flat_map(|w| a.letters().map(move |l| w.concat(&Word(alloc::vec![l]))))
                .filter(|w| w.is_reduced(&a))
                .collect();
        }
        let p = Presentation::new(a, rels).unwrap();
        let r = run_pipeline(&p, 2, false, CertificateOptions::default()).unwrap();
        assert_eq!(r.encoded.presentation.relators.len(), 108);
        assert_eq!(r.verdict.status, Status::Certified);
        assert_eq!(r.conclusion.to_string(), "G has property (FA)");
    }
}
