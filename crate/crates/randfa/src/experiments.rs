//! Monte Carlo driver: per-trial records, per-length summaries, CSV output
//! with a JSON manifest, and byte-for-byte replay.
//!
//! Relators are drawn with replacement, so a set of `|R|` relators misses a
//! language with `m_L` of the `N_L` reduced words of length `L` with
//! probability exactly `(1 − m_L/N_L)^{|R|}`. The intersection experiment
//! reports this value next to its empirical estimate.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, ensure, Context, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use randfa_core::blocks::{BlockAlphabet, DEFAULT_BLOCK_BUDGET};
use randfa_core::certificate::{
    starts_with, CertificateOptions, Status, CYCLIC_LAMBDA, DEFAULT_SEARCH_BUDGET, FA_LAMBDA,
};
use randfa_core::pipeline::{block_condition_holds, min_block_len, run_pipeline_with};
use randfa_core::words::{
    count_reduced, density_count, relator_rng, sample_relator_set_with_budget, sample_word, DEFAULT_RELATOR_BUDGET,
};
use randfa_core::{parse_rational, Alphabet, BAutomaton, Model, ModelParams, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formats::{automaton_from_doc, status_name, AnyAutomaton, AutomatonDoc, SCHEMA_VERSION};

/// Column names of the records file, in order.
pub const CSV_COLUMNS: [&str; 7] = ["experiment", "L", "trial", "derived_seed", "outcome", "detail", "wall_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Intersect,
    Certify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Intersect => "intersect",
            ExperimentKind::Certify => "certify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    #[default]
    Reduced,
    Cyclic,
}

impl From<ModelName> for Model {
    fn from(m: ModelName) -> Model {
        match m {
            ModelName::Reduced => Model::Reduced,
            ModelName::Cyclic => Model::CyclicallyReduced,
        }
    }
}

/// Work limits. Only counts are used, never wall time, so that outcomes are
/// reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub search_nodes: u64,
    pub relators: u64,
    pub block_letters: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            search_nodes: DEFAULT_SEARCH_BUDGET,
            relators: DEFAULT_RELATOR_BUDGET,
            block_letters: DEFAULT_BLOCK_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: u32,
    /// Density, as `"3/10"` or `"0.3"`.
    pub d: String,
    #[serde(default)]
    pub model: ModelName,
    #[serde(rename = "L_values")]
    pub l_values: Vec<usize>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    /// Intersection runs report whether the automaton is this large; defaults
    /// to 1/3. Certificate runs accept only the certificate's own constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: Budget,
    pub output_path: PathBuf,
    /// Intersection runs only; "starts with a" when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonDoc>,
    /// Fill `wall_ms`; off by default so record files stay reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn density(&self) -> Result<Rational> {
        Ok(parse_rational(&self.d)?)
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(!self.l_values.is_empty(), "L_values is empty");
        let density = self.density()?;
        for &l in &self.l_values {
            ModelParams { n: self.n, density, length: l, model: self.model.into(), seed: self.seed }.validate()?;
            let count = density_count(self.n, density, l);
            ensure!(
                count <= BigUint::from(self.budget.relators),
                "L = {l} needs {count} relators, over the budget of {}",
                self.budget.relators
            );
        }
        match kind {
            ExperimentKind::Intersect => {
                ensure!(
                    self.model == ModelName::Reduced,
                    "the intersection experiment compares against reduced-word counts; use model \"reduced\""
                );
                ensure!(self.block_len.is_none(), "B applies to certificate experiments only");
            }
            ExperimentKind::Certify => {
                let b = self.block_len.ok_or_else(|| anyhow!("certificate experiments require B"))?;
                let cyclic = self.model == ModelName::Cyclic;
                ensure!(b >= min_block_len(cyclic), "B must be at least {}", min_block_len(cyclic));
                ensure!(self.automaton.is_none(), "automaton applies to intersection experiments only");
                if let Some(lambda) = &self.lambda {
                    let want = if cyclic { CYCLIC_LAMBDA } else { FA_LAMBDA };
                    ensure!(parse_rational(lambda)? == want, "the certificate uses λ = {want}, config says {lambda}");
                }
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial: `h(h(h(seed) ⊕ L) ⊕ trial)` with `h` the SplitMix64 step.
pub fn derive_seed(seed: u64, length: usize, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ length as u64) ^ trial)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    #[serde(rename = "L")]
    pub length: usize,
    pub trial: u64,
    pub derived_seed: u64,
    pub outcome: String,
    pub detail: String,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectSummary {
    #[serde(rename = "L")]
    pub length: usize,
    pub relators: u64,
    pub accepted: String,
    pub reduced_words: String,
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub exact: f64,
    pub sigma: f64,
    pub within_3_sigma: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifySummary {
    #[serde(rename = "L")]
    pub length: usize,
    pub trials: u64,
    pub certified: u64,
    pub not_certified: u64,
    pub unknown: u64,
    pub block_relators_mean: f64,
    pub pairings_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Summary {
    Intersect { lambda_large: bool, rows: Vec<IntersectSummary> },
    Certify { block_condition: Vec<(usize, bool)>, rows: Vec<CertifySummary> },
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// `1 − (1 − m/N)^r` in floating point, accurate for tiny `m/N`.
pub fn exact_intersection_probability(accepted: &BigUint, total: &BigUint, relators: u64) -> f64 {
    1.0 - miss_probability(accepted, total, relators)
}

fn miss_probability(accepted: &BigUint, total: &BigUint, relators: u64) -> f64 {
    if relators == 0 || accepted.is_zero() {
        return 1.0;
    }
    if accepted >= total {
        return 0.0;
    }
    let p =
        BigRational::new(BigInt::from(accepted.clone()), BigInt::from(total.clone())).to_f64().expect("ratio in [0,1]");
    (relators as f64 * (-p).ln_1p()).exp()
}

/// `(1 − m/N)^r` as an exact fraction.
pub fn exact_miss_probability(accepted: &BigUint, total: &BigUint, relators: u32) -> BigRational {
    let q = BigRational::new(BigInt::from(total.clone()) - BigInt::from(accepted.clone()), BigInt::from(total.clone()));
    num_traits::pow(q, relators as usize)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().context("building worker pool")
}

fn tasks(cfg: &ExperimentConfig) -> Vec<(usize, u64)> {
    cfg.l_values.iter().flat_map(|&l| (0..cfg.trials).map(move |t| (l, t))).collect()
}

fn elapsed_ms(cfg: &ExperimentConfig, start: Instant) -> u64 {
    if cfg.record_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    match kind {
        ExperimentKind::Intersect => {
            let automaton = match &cfg.automaton {
                None => starts_with(Alphabet::new(cfg.n)?, Alphabet::new(cfg.n)?.generator(0)),
                Some(doc) => match automaton_from_doc(doc)? {
                    f if f.codec.blocks_doc().is_some() => bail!("the automaton must be over the base alphabet"),
                    f => match f.automaton {
                        AnyAutomaton::B(a) => a,
                        AnyAutomaton::E(_) => bail!("the intersection experiment takes a b-automaton"),
                    },
                },
            };
            run_intersection_experiment(cfg, &automaton, threads)
        }
        ExperimentKind::Certify => run_certificate_experiment(cfg, threads),
    }
}

/// For each `L`, samples relator sets and records whether one of them lies
/// in the language of `automaton`.
pub fn run_intersection_experiment(
    cfg: &ExperimentConfig,
    automaton: &BAutomaton,
    threads: usize,
) -> Result<ExperimentOutput> {
    cfg.validate(ExperimentKind::Intersect)?;
    let alphabet = Alphabet::new(cfg.n)?;
    ensure!(
        *automaton.alphabet() == alphabet,
        "automaton is over {} generators, config says n = {}",
        automaton.alphabet().rank(),
        cfg.n
    );
    let density = cfg.density()?;
    let lambda = match &cfg.lambda {
        Some(l) => parse_rational(l)?,
        None => FA_LAMBDA,
    };
    let counts = |l: usize| density_count(cfg.n, density, l).to_u64().expect("checked against the budget");

    let pool = thread_pool(threads)?;
    let records: Vec<TrialRecord> = pool.install(|| {
        tasks(cfg)
            .par_iter()
            .map(|&(l, trial)| {
                let start = Instant::now();
                let seed = derive_seed(cfg.seed, l, trial);
                let relators = counts(l);
                let hit = (0..relators).find(|&i| {
                    let w = sample_word(&alphabet, l, Model::Reduced, &mut relator_rng(seed, i));
                    automaton.accepts(&w).unwrap_or(false)
                });
                TrialRecord {
                    experiment: ExperimentKind::Intersect.name().into(),
                    length: l,
                    trial,
                    derived_seed: seed,
                    outcome: if hit.is_some() { "hit" } else { "miss" }.into(),
                    detail: match hit {
                        Some(i) => format!("relator={i}"),
                        None => format!("relators={relators}"),
                    },
                    wall_ms: elapsed_ms(cfg, start),
                }
            })
            .collect()
    });

    let rows = cfg
        .l_values
        .iter()
        .map(|&l| {
            let hits = records.iter().filter(|r| r.length == l && r.outcome == "hit").count() as u64;
            let accepted = automaton.count_reduced_words(l);
            let total = count_reduced(cfg.n, l);
            let exact = exact_intersection_probability(&accepted, &total, counts(l));
            let sigma = (exact * (1.0 - exact) / cfg.trials as f64).sqrt();
            let empirical = hits as f64 / cfg.trials as f64;
            IntersectSummary {
                length: l,
                relators: counts(l),
                accepted: accepted.to_string(),
                reduced_words: total.to_string(),
                trials: cfg.trials,
                hits,
                empirical,
                exact,
                sigma,
                within_3_sigma: (empirical - exact).abs() <= 3.0 * sigma,
            }
        })
        .collect();
    Ok(ExperimentOutput {
        records,
        summary: Summary::Intersect { lambda_large: automaton.is_lambda_large(lambda), rows },
    })
}

/// For each `L`, samples presentations, encodes them over the block
/// alphabet and runs the certificate there.
pub fn run_certificate_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    cfg.validate(ExperimentKind::Certify)?;
    let density = cfg.density()?;
    let block_len = cfg.block_len.expect("validated");
    let cyclic = cfg.model == ModelName::Cyclic;
    let blocks = BlockAlphabet::with_budget(Alphabet::new(cfg.n)?, block_len, cfg.budget.block_letters)?;
    let opts = CertificateOptions { search_budget: cfg.budget.search_nodes, ..CertificateOptions::default() };

    let pool = thread_pool(threads)?;
    let results: Vec<(TrialRecord, usize, usize)> = pool.install(|| {
        tasks(cfg)
            .par_iter()
            .map(|&(l, trial)| {
                let start = Instant::now();
                let seed = derive_seed(cfg.seed, l, trial);
                let params = ModelParams { n: cfg.n, density, length: l, model: cfg.model.into(), seed };
                let p = sample_relator_set_with_budget(&params, cfg.budget.relators)?;
                let report = run_pipeline_with(&blocks, &p, cyclic, opts)?;
                let block_relators = report.encoded.presentation.relators.len();
                let pairings = report.encoded.pairing_log.len();
                let detail = format!(
                    "method={};spent={};relators={};block_relators={block_relators};pairings={pairings}",
                    crate::formats::method_name(report.verdict.method),
                    report.verdict.budget_spent,
                    p.relators.len(),
                );
                let record = TrialRecord {
                    experiment: ExperimentKind::Certify.name().into(),
                    length: l,
                    trial,
                    derived_seed: seed,
                    outcome: status_name(report.verdict.status).into(),
                    detail,
                    wall_ms: elapsed_ms(cfg, start),
                };
                Ok((record, block_relators, pairings))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let rows = cfg
        .l_values
        .iter()
        .map(|&l| {
            let cell: Vec<_> = results.iter().filter(|(r, _, _)| r.length == l).collect();
            let count = |s: Status| cell.iter().filter(|(r, _, _)| r.outcome == status_name(s)).count() as u64;
            let mean = |f: fn(&(TrialRecord, usize, usize)) -> usize| {
                cell.iter().map(|c| f(c) as f64).sum::<f64>() / cell.len() as f64
            };
            CertifySummary {
                length: l,
                trials: cfg.trials,
                certified: count(Status::Certified),
                not_certified: count(Status::NotCertified),
                unknown: count(Status::Unknown),
                block_relators_mean: mean(|c| c.1),
                pairings_mean: mean(|c| c.2),
            }
        })
        .collect();
    let condition = block_condition_holds(cfg.n, density, block_len, cyclic)?;
    Ok(ExperimentOutput {
        records: results.into_iter().map(|(r, _, _)| r).collect(),
        summary: Summary::Certify { block_condition: vec![(block_len, condition)], rows },
    })
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| anyhow!("flushing records: {e}"))
}

/// Reads a records file, rejecting any header other than [`CSV_COLUMNS`].
pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    ensure!(header == CSV_COLUMNS, "unexpected columns {header:?} in {}", path.display());
    r.deserialize().map(|rec| rec.map_err(Into::into)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub tool_version: String,
    /// Records file name, relative to the manifest.
    pub records: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn manifest_path(records: &Path) -> PathBuf {
    let mut name = records.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

/// Writes the records to `cfg.output_path` and the manifest next to it;
/// returns the manifest path.
pub fn write_results(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
    started_unix: u64,
) -> Result<PathBuf> {
    let path = &cfg.output_path;
    write_atomically(path, &records_to_csv(records)?)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        experiment: kind,
        config: cfg.clone(),
        seed: cfg.seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        records: path
            .file_name()
            .ok_or_else(|| anyhow!("output path {} has no file name", path.display()))?
            .to_string_lossy()
            .into_owned(),
        started_unix,
        finished_unix: unix_now(),
    };
    let mpath = manifest_path(path);
    write_atomically(&mpath, (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
    Ok(mpath)
}

/// Runs an experiment and persists it.
pub fn run_and_write(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<(ExperimentOutput, PathBuf)> {
    let started = unix_now();
    let out = run_experiment(kind, cfg, threads)?;
    let manifest = write_results(kind, cfg, &out.records, started)?;
    Ok((out, manifest))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))?;
    ensure!(m.schema_version == SCHEMA_VERSION, "manifest schema version {} is not supported", m.schema_version);
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub records_path: PathBuf,
    pub identical: bool,
    /// 1-based line of the first differing record line.
    pub first_difference: Option<usize>,
    pub lines: usize,
}

/// Re-runs the experiment a manifest describes and compares the records
/// byte for byte with the stored file.
pub fn replay(manifest: &Path, threads: usize) -> Result<ReplayReport> {
    let m = read_manifest(manifest)?;
    let records_path = manifest.parent().unwrap_or(Path::new("")).join(&m.records);
    let stored = fs::read(&records_path).with_context(|| format!("reading {}", records_path.display()))?;
    let fresh = records_to_csv(&run_experiment(m.experiment, &m.config, threads)?.records)?;
    let first_difference = if stored == fresh {
        None
    } else {
        let mut a = stored.split(|&b| b == b'\n');
        let mut b = fresh.split(|&b| b == b'\n');
        let mut line = 1;
        loop {
            match (a.next(), b.next()) {
                (Some(x), Some(y)) if x == y => line += 1,
                _ => break Some(line),
            }
        }
    };
    Ok(ReplayReport {
        records_path,
        identical: first_difference.is_none(),
        first_difference,
        lines: fresh.iter().filter(|&&b| b == b'\n').count(),
    })
}

/// `1 − (1 − m/N)^r` exactly, for callers that want the closed form.
pub fn exact_intersection_fraction(accepted: &BigUint, total: &BigUint, relators: u32) -> BigRational {
    BigRational::one() - exact_miss_probability(accepted, total, relators)
}
