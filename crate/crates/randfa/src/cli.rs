//! The `randfa` command line.
//!
//! Exit codes: 0 success or Certified, 1 NotCertified or a failed check,
//! 2 Unknown (search budget exhausted), 64 usage or input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use randfa_core::blocks::BlockAlphabet;
use randfa_core::certificate::{
    fa_certificate_cyclic_with, fa_certificate_with, CertificateOptions, CertificateVerdict, Status, Witness,
    DEFAULT_SEARCH_BUDGET,
};
use randfa_core::pipeline::{block_condition_holds, run_pipeline_with, Conclusion};
use randfa_core::splittings::{Factor, LetterClass, SplittingAssignment};
use randfa_core::words::sample_relator_set;
use randfa_core::{parse_rational, Model, ModelParams, Rational};

use crate::experiments::{self, ExperimentConfig, ExperimentKind, Summary};
use crate::formats::{self, AnyAutomaton, BlockSummary, LetterCodec, PairingDoc, PairingLogDoc, PresentationFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "randfa", version, about = "Automaton certificates for property (FA) of random groups")]
pub struct Cli {
    /// Worker threads for experiments; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random presentation in the density model.
    Sample(SampleArgs),
    /// Count words of one length accepted by an automaton.
    Count(CountArgs),
    /// Word counts up to a length and the ratio of the last two.
    Growth(GrowthArgs),
    /// Run the (FA) certificate on a presentation.
    Certify(CertifyArgs),
    /// Re-encode a presentation over the block alphabet.
    Encode(EncodeArgs),
    /// Build and check the automata derived from a splitting assignment.
    Lemmas(LemmasArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Reduced,
    Cyclic,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u32,
    /// Density, e.g. 3/10 or 0.3.
    #[arg(long)]
    pub d: String,
    #[arg(long = "L")]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Reduced)]
    pub model: ModelArg,
    #[arg(long, env = "RANDFA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the JSON presentation format.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long = "L")]
    pub length: usize,
    /// Count reduced words only.
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long = "Lmax")]
    pub max_len: usize,
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    /// Use the e-automaton certificate for cyclically reduced relators.
    #[arg(long)]
    pub cyclic: bool,
    /// Search node budget.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    pub budget: u64,
    /// Print the versioned JSON verdict instead of the summary.
    #[arg(long)]
    pub json: bool,
    /// Search even where enumeration is feasible.
    #[arg(long)]
    pub force_search: bool,
    /// Encode with blocks of this length first and certify the block presentation.
    #[arg(long = "blocks")]
    pub block_len: Option<usize>,
    /// Density used only to report the block-length condition.
    #[arg(long)]
    pub d: Option<String>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    #[arg(long = "B")]
    pub block_len: usize,
    /// Output file; the pairing log goes to `<out>.pairing.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LemmasArgs {
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long = "Lmax", default_value_t = 6)]
    pub max_len: usize,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Empirical and exact probability that relators hit an automaton language.
    Intersect(ExperimentArgs),
    /// Certificate outcomes on sampled block-encoded presentations.
    Certify(ExperimentArgs),
    /// Re-run an experiment from its manifest and compare records.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "RANDFA_SEED")]
    pub seed: Option<u64>,
    /// Overrides the config output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Effective configuration, echoed before any result.
#[derive(Debug, Default)]
struct Echo(Vec<(String, String)>);

impl Echo {
    fn new(command: &str) -> Self {
        Echo(vec![("command".into(), command.into())])
    }

    fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    fn write(&self, out: &mut dyn Write) -> Result<()> {
        for (k, v) in &self.0 {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }

    fn map(&self) -> BTreeMap<String, String> {
        self.0.iter().cloned().collect()
    }
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Reduced => "reduced",
        ModelArg::Cyclic => "cyclic",
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Sample(a) => sample(a, out),
        Command::Count(a) => count(a, out),
        Command::Growth(a) => growth(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Encode(a) => encode(a, out),
        Command::Lemmas(a) => lemmas(a, out),
        Command::Experiment(ExperimentCommand::Intersect(a)) => {
            experiment(ExperimentKind::Intersect, a, cli.threads, out)
        }
        Command::Experiment(ExperimentCommand::Certify(a)) => experiment(ExperimentKind::Certify, a, cli.threads, out),
        Command::Experiment(ExperimentCommand::Replay(a)) => replay(a, cli.threads, out),
    }
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> Result<i32> {
    let density = parse_rational(&a.d)?;
    let model = match a.model {
        ModelArg::Reduced => Model::Reduced,
        ModelArg::Cyclic => Model::CyclicallyReduced,
    };
    let params = ModelParams { n: a.n, density, length: a.length, model, seed: a.seed };
    let mut echo = Echo::new("sample");
    echo.set("n", a.n).set("d", density).set("L", a.length).set("model", model_name(a.model)).set("seed", a.seed);
    echo.set("relators", params.relator_count()?);
    let file = PresentationFile::plain(sample_relator_set(&params)?);
    let body = if a.json { formats::presentation_json(&file)? } else { formats::format_presentation(&file)? };
    match &a.out {
        Some(path) => {
            echo.set("out", path.display());
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            echo.write(out)?;
            writeln!(out, "wrote {} relators to {}", file.presentation.relators.len(), path.display())?;
        }
        None => {
            // JSON cannot carry comment lines; the echo is omitted there.
            if !a.json {
                echo.write(out)?;
            }
            out.write_all(body.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

fn count(a: &CountArgs, out: &mut dyn Write) -> Result<i32> {
    let file = formats::read_automaton(&a.automaton)?;
    let mut echo = Echo::new("count");
    echo.set("automaton", a.automaton.display()).set("L", a.length).set("reduced", a.reduced);
    echo.write(out)?;
    let c = match &file.automaton {
        AnyAutomaton::B(b) if a.reduced => b.count_reduced_words(a.length),
        AnyAutomaton::B(b) => b.count_words(a.length),
        AnyAutomaton::E(e) if a.reduced => e.count_reduced_words(a.length),
        AnyAutomaton::E(e) => e.count_words(a.length),
    };
    writeln!(out, "{c}")?;
    Ok(EXIT_OK)
}

fn growth(a: &GrowthArgs, out: &mut dyn Write) -> Result<i32> {
    if a.max_len < 2 {
        bail!("--Lmax must be at least 2");
    }
    let file = formats::read_automaton(&a.automaton)?;
    let mut echo = Echo::new("growth");
    echo.set("automaton", a.automaton.display()).set("Lmax", a.max_len).set("reduced", a.reduced);
    echo.write(out)?;
    let counts = match &file.automaton {
        AnyAutomaton::B(b) => b.counts_upto(a.max_len, a.reduced),
        AnyAutomaton::E(e) => e.counts_upto(a.max_len, a.reduced),
    };
    let base = file.automaton.base();
    match base.largeness() {
        Some(l) => writeln!(out, "largeness: {l}")?,
        None => writeln!(out, "largeness: none (empty start set)")?,
    }
    writeln!(out, "L\tcount\tratio")?;
    for (l, c) in counts.iter().enumerate().skip(1) {
        writeln!(out, "{l}\t{c}\t{}", ratio_text(&counts[l - 1], c, l))?;
    }
    let last = a.max_len;
    writeln!(out, "growth estimate: {}", ratio_text(&counts[last - 1], &counts[last], last))?;
    Ok(EXIT_OK)
}

fn ratio_text(prev: &BigUint, cur: &BigUint, l: usize) -> String {
    if l < 2 || prev.is_zero() {
        return "-".into();
    }
    let r = num_rational::BigRational::new(cur.clone().into(), prev.clone().into());
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

fn conclusion_of(status: Status) -> Conclusion {
    if status == Status::Certified {
        Conclusion::HasFA
    } else {
        Conclusion::Inconclusive
    }
}

fn exit_for(status: Status) -> i32 {
    match status {
        Status::Certified => EXIT_OK,
        Status::NotCertified => EXIT_NEGATIVE,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let file = formats::read_presentation(&a.presentation)?;
    let opts =
        CertificateOptions { search_budget: a.budget, force_search: a.force_search, ..CertificateOptions::default() };
    let mut echo = Echo::new("certify");
    echo.set("presentation", a.presentation.display())
        .set("cyclic", a.cyclic)
        .set("budget", a.budget)
        .set("force_search", a.force_search);
    if let Some(b) = a.block_len {
        echo.set("blocks", b);
    }
    if let Some(d) = &a.d {
        echo.set("d", parse_rational(d)?);
    }

    let (verdict, codec, relators, blocks, relators_checked) = match a.block_len {
        None => {
            let p = &file.presentation;
            let v = if a.cyclic { fa_certificate_cyclic_with(p, opts) } else { fa_certificate_with(p, opts) };
            (v, file.codec.clone(), p.relators.len(), None, p.relators.clone())
        }
        Some(b) => {
            if !matches!(file.codec, LetterCodec::Plain(_)) {
                bail!("--blocks needs a presentation over the base alphabet");
            }
            let blocks = BlockAlphabet::new(file.presentation.alphabet, b)?;
            let report = run_pipeline_with(&blocks, &file.presentation, a.cyclic, opts)?;
            let codec = LetterCodec::Blocks(Box::new(blocks));
            let summary = BlockSummary {
                block_len: b,
                n_hat: report.encoded.presentation.alphabet.rank(),
                offset: report.encoded.offset,
                block_relators: report.encoded.presentation.relators.len(),
                pairings: report.encoded.pairing_log.len(),
            };
            let checked = report.encoded.presentation.relators.clone();
            (report.verdict, codec, file.presentation.relators.len(), Some(summary), checked)
        }
    };
    let conclusion = conclusion_of(verdict.status);

    if a.json {
        let doc = formats::verdict_doc(echo.map(), &verdict, &codec, relators, blocks, conclusion.to_string())?;
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(exit_for(verdict.status));
    }

    echo.write(out)?;
    writeln!(out, "relators: {relators}")?;
    if let Some(b) = &blocks {
        writeln!(out, "block alphabet: n_hat = {}, offset P = {}", b.n_hat, b.offset)?;
        writeln!(out, "block relators: {} ({} pairings)", b.block_relators, b.pairings)?;
        if let Some(d) = &a.d {
            let holds = block_condition_holds(file.presentation.n(), parse_rational(d)?, b.block_len, a.cyclic)?;
            writeln!(out, "block-length condition at d = {d}: {}", if holds { "holds" } else { "fails" })?;
        }
    }
    write_verdict(out, &verdict, &codec, &relators_checked)?;
    writeln!(out, "conclusion: {conclusion}")?;
    Ok(exit_for(verdict.status))
}

fn write_verdict(
    out: &mut dyn Write,
    v: &CertificateVerdict,
    codec: &LetterCodec,
    relators: &[randfa_core::Word],
) -> Result<()> {
    writeln!(out, "status: {}", formats::status_name(v.status))?;
    writeln!(out, "method: {}", formats::method_name(v.method))?;
    match v.eps {
        Some(eps) => writeln!(out, "lambda: {}, eps: {eps}", v.lambda)?,
        None => writeln!(out, "lambda: {}", v.lambda)?,
    }
    writeln!(out, "budget spent: {}", v.budget_spent)?;
    if let Some(w) = &v.witness {
        writeln!(out, "witness replays: {}", if v.witness_is_valid(relators) { "yes" } else { "NO" })?;
        let (base, tau) = match w {
            Witness::B(b) => (b, None),
            Witness::E(e) => (e.base(), Some(e.taus())),
        };
        let set = |s: &randfa_core::LetterSet| -> Result<String> {
            Ok(s.iter().map(|l| codec.format_letter(l)).collect::<Result<Vec<_>>>()?.join(" "))
        };
        writeln!(out, "witness sigma_empty: {}", set(base.sigma_empty())?)?;
        for s in base.alphabet().letters() {
            writeln!(out, "witness sigma {}: {}", codec.format_letter(s)?, set(base.sigma(s))?)?;
        }
        if let Some(tau) = tau {
            for s in base.alphabet().letters() {
                writeln!(out, "witness tau {}: {}", codec.format_letter(s)?, set(&tau[s.index()])?)?;
            }
        }
    }
    Ok(())
}

fn encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<i32> {
    let file = formats::read_presentation(&a.presentation)?;
    if !matches!(file.codec, LetterCodec::Plain(_)) {
        bail!("the input is already a block presentation");
    }
    let blocks = BlockAlphabet::new(file.presentation.alphabet, a.block_len)?;
    let encoded = blocks.associated_presentation(&file.presentation)?;
    let mut echo = Echo::new("encode");
    echo.set("presentation", a.presentation.display()).set("B", a.block_len);
    let log = PairingLogDoc {
        schema_version: formats::SCHEMA_VERSION,
        block_len: a.block_len,
        offset: encoded.offset,
        pairings: encoded
            .pairing_log
            .iter()
            .map(|p| Ok(PairingDoc { first: p.first, second: p.second, v: blocks.base().format_word(&p.v)? }))
            .collect::<Result<_>>()?,
    };
    let out_file =
        PresentationFile { presentation: encoded.presentation.clone(), codec: LetterCodec::Blocks(Box::new(blocks)) };
    let text = formats::format_presentation(&out_file)?;
    match &a.out {
        Some(path) => {
            let sidecar = pairing_path(path);
            echo.set("out", path.display()).set("pairing_log", sidecar.display());
            echo.write(out)?;
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            fs::write(&sidecar, serde_json::to_string_pretty(&log)? + "\n")
                .with_context(|| format!("writing {}", sidecar.display()))?;
            writeln!(out, "n_hat: {}", out_file.presentation.alphabet.rank())?;
            writeln!(out, "offset P: {}", encoded.offset)?;
            writeln!(out, "block relators: {}", out_file.presentation.relators.len())?;
            writeln!(out, "pairings: {}", log.pairings.len())?;
        }
        None => {
            echo.write(out)?;
            writeln!(out, "# offset P: {}", encoded.offset)?;
            for p in &log.pairings {
                writeln!(out, "# pairing: r{} r{} v={}", p.first, p.second, p.v)?;
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

fn pairing_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".pairing.json");
    PathBuf::from(name)
}

fn class_name(c: LetterClass) -> &'static str {
    match c {
        LetterClass::InA => "A",
        LetterClass::InB => "B",
        LetterClass::Trivial => "trivial",
        LetterClass::Mixed => "mixed",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn lemmas(a: &LemmasArgs, out: &mut dyn Write) -> Result<i32> {
    let given = formats::read_assignment(&a.assignment)?;
    let mut echo = Echo::new("lemmas");
    echo.set("assignment", a.assignment.display()).set("Lmax", a.max_len);
    echo.write(out)?;
    let alphabet = given.alphabet;
    let write_images = |out: &mut dyn Write, s: &SplittingAssignment| -> Result<()> {
        for i in 0..alphabet.rank() {
            let g = alphabet.generator(i);
            writeln!(out, "  {} -> {}", alphabet.letter_char(g)?, s.product.format(&s.image(g)))?;
        }
        writeln!(out, "  total length: {}", s.total_length())?;
        Ok(())
    };
    writeln!(out, "images:")?;
    write_images(out, &given)?;
    let s = given.minimize_by_conjugation();
    if s != given {
        let bound = if given.check_minimality_bound() { "holds" } else { "fails" };
        writeln!(out, "minimality bound as given: {bound}")?;
        writeln!(out, "after conjugation:")?;
        write_images(out, &s)?;
    }
    let c = s.classify();
    writeln!(out, "classes: alpha = {}, beta = {}, gamma = {}, delta = {}", c.alpha, c.beta, c.gamma, c.delta)?;
    for (i, class) in c.classes.iter().enumerate() {
        writeln!(out, "  {}: {}", alphabet.letter_char(alphabet.generator(i as u32))?, class_name(*class))?;
    }

    let mut ok = true;
    let mut check = |out: &mut dyn Write, label: String, pass: bool| -> Result<()> {
        ok &= pass;
        writeln!(out, "{label}: {}", if pass { "ok" } else { "FAILED" })?;
        Ok(())
    };

    let (la, lb) = s.reduction_largeness();
    writeln!(out, "reduction automata: A side {la}-large, B side {lb}-large")?;
    for r in s.build_reduction_automata() {
        let side = match r.side {
            Factor::A => "A",
            Factor::B => "B",
        };
        let start = alphabet.letter_char(r.start)?;
        if s.reduction_applies(&r) {
            let found = s.first_trivial_word(&r.automaton, 1, a.max_len);
            check(out, format!("  {side}^{start}: no trivial word up to length {}", a.max_len), found.is_none())?;
        } else {
            writeln!(
                out,
                "  {side}^{start}: not applicable (image of {start} is {})",
                class_name(s.class_of(r.start))
            )?;
        }
    }

    let bound = s.check_minimality_bound();
    check(out, "minimality bound".into(), bound)?;
    let main = s.build_main_automaton();
    let target = s.main_largeness();
    let half = Rational::new(1, 2);
    writeln!(out, "main automaton: largeness {}, expected at least {target}", fmt_largeness(main.largeness()))?;
    check(out, "main automaton 1/2-large".into(), main.is_lambda_large(half))?;
    if bound {
        let claim = s.verify_claim(a.max_len)?;
        let label = format!("claim up to length {} ({} words)", a.max_len, claim.words_checked);
        check(out, label, claim.holds())?;
        if let Some(w) = &claim.counterexample {
            writeln!(out, "  counterexample: {}", alphabet.format_word(w)?)?;
        }
        let found = s.first_trivial_word(&main, 1, a.max_len);
        check(out, format!("main automaton: no trivial word up to length {}", a.max_len), found.is_none())?;
        let e = s.build_main_e_automaton();
        let found = s.first_trivial_word_e(&e, 3, a.max_len);
        check(out, format!("main e-automaton: no trivial word of length 3..={}", a.max_len), found.is_none())?;
    } else {
        writeln!(out, "claim: skipped, the minimality bound fails")?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
}

fn fmt_largeness(l: Option<Rational>) -> String {
    l.map_or_else(|| "none".into(), |l| l.to_string())
}

fn load_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", a.config.display()))?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &a.out {
        cfg.output_path = out.clone();
    }
    Ok(cfg)
}

fn experiment(kind: ExperimentKind, a: &ExperimentArgs, threads: usize, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(a)?;
    let mut echo = Echo::new(&format!("experiment {}", kind.name()));
    echo.set("config", a.config.display())
        .set("n", cfg.n)
        .set("d", cfg.density()?)
        .set("model", serde_json::to_value(cfg.model)?.as_str().unwrap_or("?"))
        .set("L_values", format!("{:?}", cfg.l_values))
        .set("trials", cfg.trials)
        .set("seed", cfg.seed)
        .set("threads", threads)
        .set("output", cfg.output_path.display());
    if let Some(b) = cfg.block_len {
        echo.set("B", b);
    }
    echo.write(out)?;
    let (result, manifest) = experiments::run_and_write(kind, &cfg, threads)?;
    match &result.summary {
        Summary::Intersect { lambda_large, rows } => {
            writeln!(out, "automaton is {}-large: {}", cfg.lambda.as_deref().unwrap_or("1/3"), yes_no(*lambda_large))?;
            writeln!(out, "L\trelators\thits\ttrials\tempirical\texact\twithin_3_sigma")?;
            for r in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
                    r.length,
                    r.relators,
                    r.hits,
                    r.trials,
                    r.empirical,
                    r.exact,
                    yes_no(r.within_3_sigma)
                )?;
            }
        }
        Summary::Certify { block_condition, rows } => {
            for (b, holds) in block_condition {
                let warn = if *holds { "holds" } else { "fails (warning: the hypothesis is not met)" };
                writeln!(out, "block-length condition at B = {b}: {warn}")?;
            }
            writeln!(out, "L\tCertified\tNotCertified\tUnknown\tblock_relators\tpairings")?;
            for r in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{:.1}\t{:.1}",
                    r.length, r.certified, r.not_certified, r.unknown, r.block_relators_mean, r.pairings_mean
                )?;
            }
        }
    }
    writeln!(out, "records: {}", cfg.output_path.display())?;
    writeln!(out, "manifest: {}", manifest.display())?;
    Ok(EXIT_OK)
}

fn replay(a: &ReplayArgs, threads: usize, out: &mut dyn Write) -> Result<i32> {
    let mut echo = Echo::new("experiment replay");
    echo.set("manifest", a.manifest.display()).set("threads", threads);
    echo.write(out)?;
    let report = experiments::replay(&a.manifest, threads)?;
    writeln!(out, "records: {} ({} lines)", report.records_path.display(), report.lines)?;
    match report.first_difference {
        None => {
            writeln!(out, "identical: yes")?;
            Ok(EXIT_OK)
        }
        Some(line) => {
            writeln!(out, "identical: no (first difference at line {line})")?;
            Ok(EXIT_NEGATIVE)
        }
    }
}
