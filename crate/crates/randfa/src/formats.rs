//! File formats: presentations (text and JSON), automata, splitting
//! assignments and certificate verdicts.
//!
//! Letters are written `a..z` for generators and `A..Z` for their inverses.
//! Over a block alphabet each letter is its block in brackets, `[aB]`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use randfa_core::blocks::BlockAlphabet;
use randfa_core::certificate::{CertificateVerdict, Method, Status, Witness};
use randfa_core::splittings::SplittingAssignment;
use randfa_core::{Alphabet, BAutomaton, EAutomaton, Letter, LetterSet, Presentation, Word};
use serde::{Deserialize, Serialize};

/// Version of every machine-readable document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

/// How letters are spelled in a file.
#[derive(Debug, Clone)]
pub enum LetterCodec {
    Plain(Alphabet),
    Blocks(Box<BlockAlphabet>),
}

impl LetterCodec {
    /// `blocks` describes the block alphabet, if any, that `n` counts.
    pub fn new(n: u32, blocks: Option<BlocksDoc>) -> Result<Self> {
        match blocks {
            None => Ok(LetterCodec::Plain(Alphabet::new(n)?)),
            Some(b) => {
                let blocks = BlockAlphabet::new(Alphabet::new(b.n)?, b.block_len)?;
                if blocks.n_hat() != n {
                    bail!(
                        "block alphabet over {} generators with B = {} has {} letters, file says n = {n}",
                        b.n,
                        b.block_len,
                        blocks.n_hat()
                    );
                }
                Ok(LetterCodec::Blocks(Box::new(blocks)))
            }
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            LetterCodec::Plain(a) => *a,
            LetterCodec::Blocks(b) => *b.hat(),
        }
    }

    pub fn blocks_doc(&self) -> Option<BlocksDoc> {
        match self {
            LetterCodec::Plain(_) => None,
            LetterCodec::Blocks(b) => Some(BlocksDoc { n: b.base().rank(), block_len: b.block_len() }),
        }
    }

    pub fn format_letter(&self, l: Letter) -> Result<String> {
        Ok(match self {
            LetterCodec::Plain(a) => a.letter_char(l)?.to_string(),
            LetterCodec::Blocks(b) => b.format_letter(l)?,
        })
    }

    pub fn format_word(&self, w: &Word) -> Result<String> {
        Ok(match self {
            LetterCodec::Plain(a) => a.format_word(w)?,
            LetterCodec::Blocks(b) => b.format_word(w)?,
        })
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Ok(match self {
            LetterCodec::Plain(a) => a.parse_word(s)?,
            LetterCodec::Blocks(b) => b.parse_word(s)?,
        })
    }

    pub fn parse_letter(&self, s: &str) -> Result<Letter> {
        let w = self.parse_word(s)?;
        match w.letters() {
            [l] => Ok(*l),
            _ => bail!("expected a single letter, got {s:?}"),
        }
    }

    fn format_set(&self, set: &LetterSet) -> Result<Vec<String>> {
        set.iter().map(|l| self.format_letter(l)).collect()
    }

    fn parse_set(&self, letters: &[String]) -> Result<LetterSet> {
        let size = self.alphabet().size();
        let parsed = letters.iter().map(|s| self.parse_letter(s)).collect::<Result<Vec<_>>>()?;
        Ok(LetterSet::from_letters(size, parsed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksDoc {
    pub n: u32,
    #[serde(rename = "B")]
    pub block_len: usize,
}

/// A presentation as read from disk, with the letter spelling it used.
#[derive(Debug, Clone)]
pub struct PresentationFile {
    pub presentation: Presentation,
    pub codec: LetterCodec,
}

impl PresentationFile {
    pub fn plain(presentation: Presentation) -> Self {
        let codec = LetterCodec::Plain(presentation.alphabet);
        PresentationFile { presentation, codec }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationDoc {
    n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<BlocksDoc>,
    relators: Vec<String>,
}

pub fn read_presentation(path: &Path) -> Result<PresentationFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_presentation(&text).with_context(|| format!("parsing presentation {}", path.display()))
}

/// Reads either format; JSON is recognised by a leading `{`.
pub fn parse_presentation(text: &str) -> Result<PresentationFile> {
    if text.trim_start().starts_with('{') {
        let doc: PresentationDoc = serde_json::from_str(text)?;
        let codec = LetterCodec::new(doc.n, doc.blocks)?;
        let relators = doc
            .relators
            .iter()
            .enumerate()
            .map(|(i, r)| relator(&codec, r).with_context(|| format!("relator {i}")))
            .collect::<Result<Vec<_>>>()?;
        let presentation = Presentation::new(codec.alphabet(), relators)?;
        return Ok(PresentationFile { presentation, codec });
    }

    let mut n = None;
    let mut blocks = None;
    let mut codec = None;
    let mut relators = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("line {}", lineno + 1);
        if n.is_none() {
            let rest = line.strip_prefix("n ").ok_or_else(|| anyhow!("{}: expected `n <integer>`", at()))?;
            n = Some(rest.trim().parse::<u32>().with_context(at)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("blocks ") {
            if codec.is_some() || blocks.is_some() {
                bail!("{}: `blocks` must come right after `n`", at());
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let [base, b] = fields[..] else { bail!("{}: expected `blocks <n> <B>`", at()) };
            blocks = Some(BlocksDoc { n: base.parse().with_context(at)?, block_len: b.parse().with_context(at)? });
            continue;
        }
        if codec.is_none() {
            codec = Some(LetterCodec::new(n.unwrap(), blocks)?);
        }
        relators.push(relator(codec.as_ref().unwrap(), line).with_context(at)?);
    }
    let n = n.ok_or_else(|| anyhow!("missing `n <integer>` header"))?;
    let codec = match codec {
        Some(c) => c,
        None => LetterCodec::new(n, blocks)?,
    };
    let presentation = Presentation::new(codec.alphabet(), relators)?;
    Ok(PresentationFile { presentation, codec })
}

fn relator(codec: &LetterCodec, s: &str) -> Result<Word> {
    let w = codec.parse_word(s)?;
    if w.is_empty() {
        bail!("empty relator");
    }
    Ok(w)
}

pub fn format_presentation(file: &PresentationFile) -> Result<String> {
    let mut out = format!("n {}\n", file.presentation.alphabet.rank());
    if let Some(b) = file.codec.blocks_doc() {
        out.push_str(&format!("blocks {} {}\n", b.n, b.block_len));
    }
    for r in &file.presentation.relators {
        out.push_str(&file.codec.format_word(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn presentation_json(file: &PresentationFile) -> Result<String> {
    let doc = PresentationDoc {
        n: file.presentation.alphabet.rank(),
        blocks: file.codec.blocks_doc(),
        relators: file.presentation.relators.iter().map(|r| file.codec.format_word(r)).collect::<Result<_>>()?,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Automaton file: `tau` present makes it an e-automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksDoc>,
    pub sigma_empty: Vec<String>,
    #[serde(default)]
    pub sigma: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyAutomaton {
    B(BAutomaton),
    E(EAutomaton),
}

impl AnyAutomaton {
    pub fn base(&self) -> &BAutomaton {
        match self {
            AnyAutomaton::B(a) => a,
            AnyAutomaton::E(e) => e.base(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AutomatonFile {
    pub automaton: AnyAutomaton,
    pub codec: LetterCodec,
}

fn sets_from_map(codec: &LetterCodec, map: &BTreeMap<String, Vec<String>>) -> Result<Vec<LetterSet>> {
    let a = codec.alphabet();
    let mut sets = vec![LetterSet::empty(a.size()); a.size() as usize];
    for (key, letters) in map {
        let s = codec.parse_letter(key).with_context(|| format!("transition key {key:?}"))?;
        sets[s.index()] = codec.parse_set(letters).with_context(|| format!("transitions of {key:?}"))?;
    }
    Ok(sets)
}

fn map_from_sets(codec: &LetterCodec, sets: &[LetterSet]) -> Result<BTreeMap<String, Vec<String>>> {
    codec.alphabet().letters().map(|s| Ok((codec.format_letter(s)?, codec.format_set(&sets[s.index()])?))).collect()
}

pub fn automaton_from_doc(doc: &AutomatonDoc) -> Result<AutomatonFile> {
    let codec = LetterCodec::new(doc.n, doc.blocks)?;
    let start = codec.parse_set(&doc.sigma_empty).context("sigma_empty")?;
    let base = BAutomaton::new(codec.alphabet(), start, sets_from_map(&codec, &doc.sigma)?)?;
    let automaton = match &doc.tau {
        None => AnyAutomaton::B(base),
        Some(tau) => AnyAutomaton::E(EAutomaton::new(base, sets_from_map(&codec, tau)?)?),
    };
    Ok(AutomatonFile { automaton, codec })
}

pub fn automaton_doc(codec: &LetterCodec, automaton: &AnyAutomaton) -> Result<AutomatonDoc> {
    let base = automaton.base();
    Ok(AutomatonDoc {
        n: base.alphabet().rank(),
        blocks: codec.blocks_doc(),
        sigma_empty: codec.format_set(base.sigma_empty())?,
        sigma: map_from_sets(codec, base.sigmas())?,
        tau: match automaton {
            AnyAutomaton::B(_) => None,
            AnyAutomaton::E(e) => Some(map_from_sets(codec, e.taus())?),
        },
    })
}

pub fn read_automaton(path: &Path) -> Result<AutomatonFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: AutomatonDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing automaton {}", path.display()))?;
    automaton_from_doc(&doc).with_context(|| format!("in automaton {}", path.display()))
}

/// Assignment file: each generator of `S` mapped to an element of `A ∗ B`,
/// written in the syllable encoding over the letters of both factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub n: u32,
    #[serde(rename = "rankA")]
    pub rank_a: u32,
    #[serde(rename = "rankB")]
    pub rank_b: u32,
    pub images: BTreeMap<String, String>,
}

pub fn assignment_from_doc(doc: &AssignmentDoc) -> Result<SplittingAssignment> {
    let alphabet = Alphabet::new(doc.n)?;
    let mut images = Vec::with_capacity(doc.n as usize);
    for i in 0..doc.n {
        let name = alphabet.letter_char(alphabet.generator(i))?.to_string();
        let image = doc.images.get(&name).ok_or_else(|| anyhow!("no image for generator {name}"))?;
        images.push(image.as_str());
    }
    for key in doc.images.keys() {
        let l = alphabet.parse_letter(key.chars().next().unwrap_or('?'))?;
        if key.chars().count() != 1 || !alphabet.is_positive(l) {
            bail!("image key {key:?} is not a generator");
        }
    }
    Ok(SplittingAssignment::parse(alphabet, doc.rank_a, doc.rank_b, &images)?)
}

pub fn read_assignment(path: &Path) -> Result<SplittingAssignment> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: AssignmentDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing assignment {}", path.display()))?;
    assignment_from_doc(&doc).with_context(|| format!("in assignment {}", path.display()))
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Certified => "Certified",
        Status::NotCertified => "NotCertified",
        Status::Unknown => "Unknown",
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Enumeration => "enumeration",
        Method::Search => "search",
    }
}

/// Machine-readable verdict; `config` echoes the effective invocation.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictDoc {
    pub schema_version: u32,
    pub config: BTreeMap<String, String>,
    pub status: &'static str,
    pub method: &'static str,
    pub lambda: String,
    pub eps: Option<String>,
    pub budget_spent: u64,
    pub relators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockSummary>,
    pub conclusion: String,
    pub witness: Option<AutomatonDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    #[serde(rename = "B")]
    pub block_len: usize,
    pub n_hat: u32,
    pub offset: usize,
    pub block_relators: usize,
    pub pairings: usize,
}

pub fn verdict_doc(
    config: BTreeMap<String, String>,
    verdict: &CertificateVerdict,
    codec: &LetterCodec,
    relators: usize,
    blocks: Option<BlockSummary>,
    conclusion: String,
) -> Result<VerdictDoc> {
    let witness = match &verdict.witness {
        None => None,
        Some(Witness::B(a)) => Some(automaton_doc(codec, &AnyAutomaton::B(a.clone()))?),
        Some(Witness::E(e)) => Some(automaton_doc(codec, &AnyAutomaton::E(e.clone()))?),
    };
    Ok(VerdictDoc {
        schema_version: SCHEMA_VERSION,
        config,
        status: status_name(verdict.status),
        method: method_name(verdict.method),
        lambda: verdict.lambda.to_string(),
        eps: verdict.eps.map(|e| e.to_string()),
        budget_spent: verdict.budget_spent,
        relators,
        blocks,
        conclusion,
        witness,
    })
}

/// One entry of the sidecar written next to an encoded presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingDoc {
    pub first: usize,
    pub second: usize,
    pub v: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingLogDoc {
    pub schema_version: u32,
    #[serde(rename = "B")]
    pub block_len: usize,
    pub offset: usize,
    pub pairings: Vec<PairingDoc>,
}
