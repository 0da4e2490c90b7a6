//! Command dispatch for the `splitorder` binary.
//!
//! Exit codes: 0 success or true, 1 false or not found, 2 invalid input,
//! 3 internal error (a diagnostic dump is written to the temp directory).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use splitorder_core::set::subsets_of_size;
use splitorder_core::{
    brute_force_cyclic_ordering, check_cyclic_ordering, cover_by_bases, cyclic_order, cyclic_order_oracle,
    evaluation_budget, exchange_distance, find_block_partition, fixtures, is_uniformly_dense, min_exchange_weight,
    ordering_to_exchange_script, partition_into_bases, BasisPartition, BasisSequence, Diagnostic, ElementSet,
    ExchangeKind, ExchangeMove, Matroid, MatroidOracle, OrderingOptions, OrderingRun, Weights,
};

use crate::format::{
    read_document, to_pretty, FormatError, Labels, LoadedMatroid, MatroidDocument, OrderingDocument,
    PartitionDocument, SequencePairDocument,
};
use crate::generate::{planted_split, Family};

#[derive(Debug, Parser)]
#[command(name = "splitorder", version, about = "Cyclic orderings of split matroids with disjoint basis partitions")]
struct Cli {
    /// Print a machine-readable run report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a matroid document and summarize the normalized representation.
    Validate { matroid: PathBuf },
    /// Order the ground set so that the parts of a partition are consecutive intervals.
    Order {
        matroid: PathBuf,
        partition: PathBuf,
        /// Write the ordering document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print phase, substitution and oracle-call counts.
        #[arg(long)]
        stats: bool,
        /// Check every tightness fact used by the construction.
        #[arg(long)]
        check_deep: bool,
    },
    /// Partition the ground set into k disjoint bases.
    Partition { matroid: PathBuf, k: usize },
    /// Check that every r cyclically consecutive elements of an ordering form a basis.
    Verify {
        matroid: PathBuf,
        ordering: PathBuf,
        /// Also require these parts as the blocks, in order.
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Decide uniform density.
    Dense { matroid: PathBuf },
    /// Exhaustive search for a cyclic ordering.
    Brute {
        matroid: PathBuf,
        /// Blocks that must appear as consecutive intervals, in order.
        #[arg(long)]
        blocks: Option<PathBuf>,
    },
    /// Search for a cyclic sequence of g-element blocks whose r/g consecutive runs are bases.
    Blocks { matroid: PathBuf, g: usize },
    /// Symmetric and cyclic basis exchanges.
    #[command(subcommand)]
    Exchange(ExchangeCommand),
    /// Print a built-in instance.
    Fixture {
        name: FixtureName,
        /// Print the fixture's partition (or block sequence) instead.
        #[arg(long)]
        partition: bool,
    },
}

#[derive(Debug, Subcommand)]
enum ExchangeCommand {
    /// Fewest exchanges between two compatible basis sequences.
    Dist {
        matroid: PathBuf,
        sequences: PathBuf,
        #[arg(long, value_enum, default_value = "symmetric")]
        kind: KindArg,
        /// Comma-separated element weights (in element order); also report the least total move weight.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Exchanges read off an ordering that rotate its blocks by one.
    Script { matroid: PathBuf, ordering: PathBuf },
    /// Sample small split instances and check that every compatible target is within r exchanges.
    Conjecture {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, value_enum, default_value = "symmetric")]
        kind: KindArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Symmetric,
    Cyclic,
}

impl From<KindArg> for ExchangeKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Symmetric => ExchangeKind::Symmetric,
            KindArg::Cyclic => ExchangeKind::Cyclic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureName {
    /// U(2,6).
    F1,
    /// Rank 2 on six elements with three disjoint circuits.
    F2,
    /// Ten-element rank-4 sparse paving matroid with pair blocks.
    #[value(alias = "example1")]
    F3,
    /// Graphic matroid of K4.
    F4,
    /// K4 as a paving representation.
    F4Paving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    False,
    NotFound,
    InvalidInput,
    InternalError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::False | Outcome::NotFound => 1,
            Outcome::InvalidInput => 2,
            Outcome::InternalError => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<OrderingDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_evaluations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command-specific result.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic_path: Option<String>,
    #[serde(skip)]
    started: Instant,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            outcome: Outcome::Success,
            message: None,
            ordering: None,
            phases: None,
            substitutions: None,
            certificates: None,
            basis_evaluations: None,
            budget: None,
            wall_time_ms: 0.0,
            seed: None,
            result: None,
            diagnostic_path: None,
            started: Instant::now(),
        }
    }

    fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }

    fn record_run(&mut self, run: &OrderingRun, n: usize, r: usize, k: usize) {
        self.phases = Some(run.stats.phases);
        self.substitutions = Some(run.stats.substitutions);
        self.certificates = Some(run.stats.certificates);
        self.basis_evaluations = Some(run.stats.basis_evaluations);
        self.budget = Some(evaluation_budget(n, r, k));
    }
}

#[derive(Debug, Serialize)]
struct DiagnosticDump {
    command: String,
    message: String,
    phase: usize,
    partition: Vec<Vec<String>>,
    prefixes: Vec<Vec<String>>,
    remainders: Vec<Vec<String>>,
    certificate: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(Box<Diagnostic>),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Core(core) => core.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<splitorder_core::Error> for CliError {
    fn from(e: splitorder_core::Error) -> Self {
        match e {
            splitorder_core::Error::InternalContradiction(d) => CliError::Internal(d),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn internal(message: String) -> CliError {
    CliError::Internal(Box::new(Diagnostic { message, ..Diagnostic::default() }))
}

/// Human-readable text plus the fields of the report.
struct Reply {
    outcome: Outcome,
    text: String,
}

impl Reply {
    fn new(outcome: Outcome, text: impl Into<String>) -> Self {
        Reply { outcome, text: text.into() }
    }
}

type CmdResult = Result<Reply, CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Outcome::InvalidInput.exit_code() } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let name = command_name(&cli.command);
    let mut report = RunReport::new(name);
    let result = dispatch(cli.command, &mut report);
    report.wall_time_ms = report.elapsed_ms();
    let text = match result {
        Ok(reply) => {
            report.outcome = reply.outcome;
            reply.text
        }
        Err(CliError::Input(message)) => {
            report.outcome = Outcome::InvalidInput;
            let _ = writeln!(stderr, "error: {message}");
            report.message = Some(message);
            String::new()
        }
        Err(CliError::Internal(diagnostic)) => {
            report.outcome = Outcome::InternalError;
            let _ = writeln!(stderr, "internal error: {diagnostic}");
            match write_dump(name, &diagnostic) {
                Ok(path) => {
                    let _ = writeln!(stderr, "diagnostic dump written to {}", path.display());
                    report.diagnostic_path = Some(path.display().to_string());
                }
                Err(e) => {
                    let _ = writeln!(stderr, "could not write diagnostic dump: {e}");
                }
            }
            report.message = Some(diagnostic.to_string());
            String::new()
        }
    };
    if cli.json {
        let _ = stdout.write_all(to_pretty(&report).as_bytes());
    } else {
        let _ = stdout.write_all(text.as_bytes());
    }
    report.outcome.exit_code()
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Validate { .. } => "validate",
        Command::Order { .. } => "order",
        Command::Partition { .. } => "partition",
        Command::Verify { .. } => "verify",
        Command::Dense { .. } => "dense",
        Command::Brute { .. } => "brute",
        Command::Blocks { .. } => "blocks",
        Command::Exchange(ExchangeCommand::Dist { .. }) => "exchange dist",
        Command::Exchange(ExchangeCommand::Script { .. }) => "exchange script",
        Command::Exchange(ExchangeCommand::Conjecture { .. }) => "exchange conjecture",
        Command::Fixture { .. } => "fixture",
    }
}

fn write_dump(command: &str, diagnostic: &Diagnostic) -> std::io::Result<PathBuf> {
    let names = |sets: &[ElementSet]| sets.iter().map(|s| s.iter().map(|e| e.to_string()).collect()).collect();
    let dump = DiagnosticDump {
        command: command.into(),
        message: diagnostic.message.clone(),
        phase: diagnostic.phase,
        partition: names(&diagnostic.partition),
        prefixes: diagnostic.prefixes.iter().map(|p| p.iter().map(|e| e.to_string()).collect()).collect(),
        remainders: names(&diagnostic.remainders),
        certificate: diagnostic.certificate.clone(),
    };
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let path = std::env::temp_dir().join(format!("splitorder-diagnostic-{}-{stamp}.json", std::process::id()));
    std::fs::write(&path, to_pretty(&dump))?;
    Ok(path)
}

fn dispatch(command: Command, report: &mut RunReport) -> CmdResult {
    match command {
        Command::Validate { matroid } => cmd_validate(&matroid, report),
        Command::Order { matroid, partition, output, stats, check_deep } => {
            cmd_order(&matroid, &partition, output.as_deref(), stats, check_deep, report)
        }
        Command::Partition { matroid, k } => cmd_partition(&matroid, k, report),
        Command::Verify { matroid, ordering, partition } => cmd_verify(&matroid, &ordering, partition.as_deref(), report),
        Command::Dense { matroid } => cmd_dense(&matroid, report),
        Command::Brute { matroid, blocks } => cmd_brute(&matroid, blocks.as_deref(), report),
        Command::Blocks { matroid, g } => cmd_blocks(&matroid, g, report),
        Command::Exchange(ExchangeCommand::Dist { matroid, sequences, kind, weights }) => {
            cmd_exchange_dist(&matroid, &sequences, kind.into(), weights, report)
        }
        Command::Exchange(ExchangeCommand::Script { matroid, ordering }) => {
            cmd_exchange_script(&matroid, &ordering, report)
        }
        Command::Exchange(ExchangeCommand::Conjecture { seed, samples, kind }) => {
            cmd_exchange_conjecture(seed, samples, kind.into(), report)
        }
        Command::Fixture { name, partition } => cmd_fixture(name, partition, report),
    }
}

fn load_matroid(path: &Path) -> Result<LoadedMatroid, CliError> {
    let doc: MatroidDocument = read_document(path)?;
    Ok(doc.load()?)
}

fn json<T: Serialize>(value: &T) -> Option<serde_json::Value> {
    Some(serde_json::to_value(value).expect("documents serialize"))
}

fn kind_name(oracle: &MatroidOracle) -> &'static str {
    match oracle {
        MatroidOracle::ElementarySplit(_) => "elementary split",
        MatroidOracle::Uniform(_) => "uniform",
        MatroidOracle::Graphic(_) => "graphic",
        MatroidOracle::ExplicitBases(_) => "explicit-bases",
        MatroidOracle::DirectSum(_) => "direct-sum",
    }
}

fn cmd_validate(path: &Path, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(path)?;
    let m = &loaded.oracle;
    let mut text = format!("valid {} matroid: n = {}, r = {}\n", kind_name(m), m.ground_size(), m.full_rank());
    let mut hyperedges = None;
    if let MatroidOracle::ElementarySplit(rep) = m {
        let class = if rep.hyperedges().is_empty() {
            "uniform"
        } else if rep.is_sparse_paving() {
            "sparse paving"
        } else if rep.is_paving() {
            "paving"
        } else {
            "split"
        };
        writeln!(text, "{} hyperedges kept ({class})", rep.hyperedges().len()).unwrap();
        for h in rep.hyperedges() {
            writeln!(text, "  {{{}}} capacity {}", loaded.labels.names_of(h.set).join(", "), h.capacity).unwrap();
        }
        hyperedges = Some(rep.hyperedges().len());
    }
    if !loaded.dropped.is_empty() {
        writeln!(
            text,
            "{} vacuous hyperedge(s) dropped (input positions {:?})",
            loaded.dropped.len(),
            loaded.dropped
        )
        .unwrap();
    }
    report.result = Some(serde_json::json!({
        "kind": kind_name(m),
        "n": m.ground_size(),
        "r": m.full_rank(),
        "hyperedges": hyperedges,
        "dropped": loaded.dropped,
    }));
    Ok(Reply::new(Outcome::Success, text))
}

fn cmd_order(
    matroid: &Path,
    partition: &Path,
    output: Option<&Path>,
    stats: bool,
    check_deep: bool,
    report: &mut RunReport,
) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let m = &loaded.oracle;
    let doc: PartitionDocument = read_document(partition)?;
    let partition = doc.partition(m, &loaded.labels)?;
    let (n, r, k) = (m.ground_size(), m.full_rank(), partition.k());
    if n != k * r {
        return Err(splitorder_core::Error::DimensionMismatch { n, k, r }.into());
    }
    let options = OrderingOptions { check_deep };
    let run = match m {
        MatroidOracle::ElementarySplit(rep) => cyclic_order(rep, &partition, options)?,
        MatroidOracle::Graphic(_) | MatroidOracle::ExplicitBases(_) => {
            match brute_force_cyclic_ordering(m, Some(partition.bases())) {
                Some(ordering) => OrderingRun { ordering, stats: Default::default() },
                None => {
                    return Ok(Reply::new(
                        Outcome::NotFound,
                        "no cyclic ordering with these parts as consecutive intervals exists\n",
                    ))
                }
            }
        }
        _ => cyclic_order_oracle(m, &partition, options)?,
    };
    // Nothing unverified leaves this function.
    if let Err(defect) = check_cyclic_ordering(m, &run.ordering, Some(partition.bases())) {
        return Err(internal(format!("produced ordering fails verification: {defect}")));
    }
    report.record_run(&run, n, r, k);
    if run.stats.basis_evaluations > evaluation_budget(n, r, k) {
        log::warn!("basis evaluations {} exceed the budget {}", run.stats.basis_evaluations, evaluation_budget(n, r, k));
    }
    let document = OrderingDocument::new(&run.ordering, &loaded.labels);
    let mut text = String::new();
    match output {
        Some(path) => {
            std::fs::write(path, to_pretty(&document))
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            writeln!(text, "ordering written to {}", path.display()).unwrap();
        }
        None => text.push_str(&to_pretty(&document)),
    }
    if stats {
        let s = &run.stats;
        writeln!(text, "phases: {}", s.phases).unwrap();
        writeln!(text, "substitutions: {}", s.substitutions).unwrap();
        writeln!(text, "certificates: {}", s.certificates).unwrap();
        writeln!(text, "basis evaluations: {} (budget {})", s.basis_evaluations, evaluation_budget(n, r, k)).unwrap();
        writeln!(text, "wall time: {:.3} ms", report.elapsed_ms()).unwrap();
    }
    report.ordering = Some(document);
    Ok(Reply::new(Outcome::Success, text))
}

fn cmd_partition(matroid: &Path, k: usize, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    match partition_into_bases(&loaded.oracle, k)? {
        Some(partition) => {
            let doc = PartitionDocument::new(partition.bases(), &loaded.labels);
            report.result = json(&doc);
            Ok(Reply::new(Outcome::Success, to_pretty(&doc)))
        }
        None => Ok(Reply::new(Outcome::NotFound, format!("no partition into {k} disjoint bases\n"))),
    }
}

fn cmd_verify(matroid: &Path, ordering: &Path, partition: Option<&Path>, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let doc: OrderingDocument = read_document(ordering)?;
    if doc.elements.as_ref().is_some_and(|e| e != loaded.labels.names()) {
        return Err(CliError::Input("the ordering's element mapping differs from the matroid's labels".into()));
    }
    let ordering = doc.ordering(&loaded.labels)?;
    let expected = match partition {
        Some(path) => Some(read_document::<PartitionDocument>(path)?.sets(&loaded.labels)?),
        None => None,
    };
    let verdict = check_cyclic_ordering(&loaded.oracle, &ordering, expected.as_deref());
    report.result = Some(serde_json::json!({ "valid": verdict.is_ok(), "defect": verdict.as_ref().err().map(|d| d.to_string()) }));
    Ok(match verdict {
        Ok(()) => Reply::new(Outcome::Success, "valid cyclic ordering\n"),
        Err(defect) => Reply::new(Outcome::False, format!("not a valid cyclic ordering: {defect}\n")),
    })
}

fn cmd_dense(matroid: &Path, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let m = &loaded.oracle;
    let (n, r) = (m.ground_size(), m.full_rank());
    let dense = is_uniformly_dense(m);
    let cover_size = if r == 0 { 0 } else { n.div_ceil(r) };
    let covered = r == 0 || cover_by_bases(m, cover_size).is_some();
    report.result = Some(serde_json::json!({ "dense": dense, "cover_size": cover_size, "covered": covered }));
    let mut text = format!("uniformly dense: {dense}\n");
    writeln!(text, "covered by {cover_size} bases: {covered}").unwrap();
    Ok(Reply::new(if dense { Outcome::Success } else { Outcome::False }, text))
}

fn cmd_brute(matroid: &Path, blocks: Option<&Path>, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let blocks = match blocks {
        Some(path) => Some(read_document::<PartitionDocument>(path)?.sets(&loaded.labels)?),
        None => None,
    };
    if let Some(blocks) = &blocks {
        let union = blocks.iter().fold(ElementSet::EMPTY, |acc, &b| acc | b);
        let total: usize = blocks.iter().map(|b| b.len()).sum();
        if union != loaded.oracle.ground_set() || total != loaded.oracle.ground_size() {
            return Err(CliError::Input("blocks must partition the ground set".into()));
        }
    }
    match brute_force_cyclic_ordering(&loaded.oracle, blocks.as_deref()) {
        Some(ordering) => {
            let doc = OrderingDocument::new(&ordering, &loaded.labels);
            let text = to_pretty(&doc);
            report.ordering = Some(doc);
            Ok(Reply::new(Outcome::Success, text))
        }
        None => Ok(Reply::new(Outcome::NotFound, "no cyclic ordering exists\n")),
    }
}

fn cmd_blocks(matroid: &Path, g: usize, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    match find_block_partition(&loaded.oracle, g)? {
        Some(blocks) => {
            let doc = PartitionDocument::new(&blocks, &loaded.labels);
            report.result = json(&doc);
            Ok(Reply::new(Outcome::Success, to_pretty(&doc)))
        }
        None => Ok(Reply::new(Outcome::NotFound, format!("no cyclic sequence of {g}-element blocks exists\n"))),
    }
}

#[derive(Debug, Serialize)]
struct MoveDocument {
    kind: &'static str,
    /// 0-based positions in the sequence.
    parts: Vec<usize>,
    elements: Vec<String>,
}

impl MoveDocument {
    fn new(mv: &ExchangeMove, labels: &Labels) -> Self {
        match mv {
            ExchangeMove::Symmetric { i, j, e, f } => MoveDocument {
                kind: "symmetric",
                parts: vec![*i, *j],
                elements: labels.names_of_list(&[*e, *f]),
            },
            ExchangeMove::Cyclic { indices, elements } => MoveDocument {
                kind: "cyclic",
                parts: indices.clone(),
                elements: labels.names_of_list(elements),
            },
        }
    }
}

fn sequence(m: &MatroidOracle, labels: &Labels, raw: &[Vec<String>]) -> Result<BasisSequence, CliError> {
    let sets = raw.iter().map(|b| labels.resolve_set(b)).collect::<Result<Vec<_>, _>>()?;
    Ok(BasisSequence::new(m, sets)?)
}

fn cmd_exchange_dist(
    matroid: &Path,
    sequences: &Path,
    kind: ExchangeKind,
    weights: Option<Vec<f64>>,
    report: &mut RunReport,
) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let doc: SequencePairDocument = read_document(sequences)?;
    if doc.format_version != crate::format::FORMAT_VERSION {
        return Err(FormatError::Version(doc.format_version).into());
    }
    let from = sequence(&loaded.oracle, &loaded.labels, &doc.from)?;
    let to = sequence(&loaded.oracle, &loaded.labels, &doc.to)?;
    if from.len() != to.len() {
        return Err(CliError::Input("the sequences have different lengths".into()));
    }
    let weights = match weights {
        Some(w) if w.len() != loaded.labels.len() => {
            return Err(CliError::Input(format!("expected {} weights, found {}", loaded.labels.len(), w.len())))
        }
        Some(w) => Some(Weights::new(w)?),
        None => None,
    };
    let distance = exchange_distance(&loaded.oracle, &from, &to, kind)?;
    let weight = match &weights {
        Some(w) => min_exchange_weight(&loaded.oracle, &from, &to, kind, w)?,
        None => None,
    };
    report.result = Some(serde_json::json!({ "distance": distance, "min_weight": weight }));
    let mut text = match distance {
        Some(d) => format!("{d}\n"),
        None => "unreachable\n".to_string(),
    };
    if let Some(w) = weight {
        writeln!(text, "least total weight: {w}").unwrap();
    }
    Ok(Reply::new(if distance.is_some() { Outcome::Success } else { Outcome::NotFound }, text))
}

fn cmd_exchange_script(matroid: &Path, ordering: &Path, report: &mut RunReport) -> CmdResult {
    let loaded = load_matroid(matroid)?;
    let doc: OrderingDocument = read_document(ordering)?;
    let ordering = doc.ordering(&loaded.labels)?;
    let k = ordering.block_count();
    let script = ordering_to_exchange_script(&loaded.oracle, &ordering, k)?;
    let moves: Vec<MoveDocument> = script.iter().map(|mv| MoveDocument::new(mv, &loaded.labels)).collect();
    report.result = json(&moves);
    let mut text = String::new();
    for mv in &moves {
        writeln!(text, "{} parts {:?}: {}", mv.kind, mv.parts, mv.elements.join(" -> ")).unwrap();
    }
    Ok(Reply::new(Outcome::Success, text))
}

/// Every ordered sequence of `k` pairwise disjoint bases covering the ground set.
pub fn ordered_partitions<M: Matroid + ?Sized>(m: &M, k: usize) -> Vec<Vec<ElementSet>> {
    let (n, r) = (m.ground_size(), m.full_rank());
    let bases: Vec<ElementSet> = subsets_of_size(n, r).filter(|&b| m.is_basis(b)).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn extend(bases: &[ElementSet], k: usize, used: ElementSet, current: &mut Vec<ElementSet>, out: &mut Vec<Vec<ElementSet>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for &b in bases {
            if b.is_disjoint(used) {
                current.push(b);
                extend(bases, k, used | b, current, out);
                current.pop();
            }
        }
    }
    if n == k * r {
        extend(&bases, k, ElementSet::EMPTY, &mut current, &mut out);
    }
    out
}

#[derive(Debug, Serialize)]
struct ConjectureSample {
    sample: usize,
    family: Family,
    n: usize,
    r: usize,
    k: usize,
    targets: usize,
    max_distance: usize,
    rotation_distance: Option<usize>,
}

fn cmd_exchange_conjecture(seed: u64, samples: usize, kind: ExchangeKind, report: &mut RunReport) -> CmdResult {
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = match kind {
        ExchangeKind::Symmetric => 2,
        ExchangeKind::Cyclic => 3,
    };
    let max_r = 8 / k;
    let mut rows = Vec::with_capacity(samples);
    let mut violations = Vec::new();
    for sample in 0..samples {
        let r = rng.random_range(2..=max_r);
        let family = *[Family::SparsePaving, Family::General].choose(&mut rng).expect("non-empty");
        let (rep, blocks) = planted_split(&mut rng, k, r, family, 10 * k * r);
        let start = BasisSequence::new(&rep, blocks)?;
        let targets = ordered_partitions(&rep, k);
        let mut max_distance = 0;
        for target in &targets {
            let target = BasisSequence::new(&rep, target.clone())?;
            match exchange_distance(&rep, &start, &target, kind)? {
                Some(d) if d <= r => max_distance = max_distance.max(d),
                found => violations.push(serde_json::json!({
                    "sample": sample,
                    "hyperedges": rep.hyperedges().iter().map(|h| (h.set.iter().collect::<Vec<_>>(), h.capacity)).collect::<Vec<_>>(),
                    "from": start.bases().iter().map(|b| b.iter().collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "to": target.bases().iter().map(|b| b.iter().collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "distance": found,
                })),
            }
        }
        let rotation_distance = exchange_distance(&rep, &start, &start.rotated(), kind)?;
        rows.push(ConjectureSample {
            sample,
            family,
            n: rep.n(),
            r,
            k,
            targets: targets.len(),
            max_distance,
            rotation_distance,
        });
    }
    let tight = rows.iter().filter(|s| s.rotation_distance == Some(s.r)).count();
    report.result = Some(serde_json::json!({ "samples": rows, "violations": violations }));
    let mut text = format!("seed {seed}: {samples} samples, k = {k}, {kind:?} exchanges\n");
    writeln!(text, "targets within r exchanges: {}", if violations.is_empty() { "all" } else { "not all" }).unwrap();
    writeln!(text, "rotation at distance exactly r: {tight} of {samples}").unwrap();
    for v in &violations {
        writeln!(text, "counterexample: {v}").unwrap();
    }
    Ok(Reply::new(if violations.is_empty() { Outcome::Success } else { Outcome::False }, text))
}

/// Fixture matroid with its labels and partition (the pair blocks for F3).
pub fn fixture(name: FixtureName) -> (MatroidOracle, Labels, Vec<ElementSet>) {
    let numbered = |n: usize| Labels::new((1..=n).map(|i| i.to_string()).collect()).expect("distinct");
    let edges = || {
        Labels::new(fixtures::K4_EDGES.iter().map(|&(u, v)| format!("{}{}", u + 1, v + 1)).collect()).expect("distinct")
    };
    let sets = |parts: &[&[usize]]| parts.iter().map(|p| p.iter().collect()).collect::<Vec<ElementSet>>();
    let trees = || sets(&[&[fixtures::K4_12, fixtures::K4_23, fixtures::K4_34], &[fixtures::K4_13, fixtures::K4_14, fixtures::K4_24]]);
    match name {
        FixtureName::F1 => (fixtures::uniform_2_6().into(), numbered(6), sets(&[&[0, 1], &[2, 3], &[4, 5]])),
        FixtureName::F2 => (fixtures::sparse_paving_6().into(), numbered(6), sets(&[&[0, 2], &[1, 4], &[3, 5]])),
        FixtureName::F3 => (
            fixtures::example_ten().into(),
            Labels::new((1..=10).map(|i| format!("a{i}")).collect()).expect("distinct"),
            fixtures::example_ten_blocks(),
        ),
        FixtureName::F4 => (fixtures::k4_graphic().into(), edges(), trees()),
        FixtureName::F4Paving => (fixtures::k4_paving().into(), edges(), trees()),
    }
}

fn cmd_fixture(name: FixtureName, partition: bool, report: &mut RunReport) -> CmdResult {
    let (oracle, labels, parts) = fixture(name);
    let text = if partition {
        let doc = PartitionDocument::new(&parts, &labels);
        report.result = json(&doc);
        to_pretty(&doc)
    } else {
        let doc = MatroidDocument::from_oracle(&oracle, &labels);
        report.result = json(&doc);
        to_pretty(&doc)
    };
    Ok(Reply::new(Outcome::Success, text))
}

/// Partition parts of a fixture as a validated basis partition.
pub fn fixture_partition(name: FixtureName) -> Option<BasisPartition> {
    let (oracle, _, parts) = fixture(name);
    BasisPartition::new(&oracle, parts).ok()
}
