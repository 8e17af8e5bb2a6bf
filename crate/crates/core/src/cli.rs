//! The `lbm` command line. Machine-readable results go to stdout (CSV),
//! summaries and the seed in use go to stderr.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};

use crate::bench::{self, PipelineFormula, DEFAULT_CADENCE};
use crate::error::{Error, Result};
use crate::formula::{parse_kb, parse_kb_with, Assignment, KnowledgeBase, VarTable};
use crate::infer::{rank_exact, search_logged, Evidence, SamplerConfig, RANK_LIMIT};
use crate::learn::{self, Dataset, DatasetSpec, TrainConfig};
use crate::normalize::{kb_clauses, MergeOptions, WeightedClause, WeightedClauseSet};
use crate::rbm::{compile_weighted, ModelFile, RbmModel, DEFAULT_EPSILON};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NO_RESULT: u8 = 2;
pub const EXIT_GUARD: u8 = 3;

// Largest formula of the benchmark family run without --full-scale.
const DESK_M: usize = 10;
const DESK_N: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "lbm",
    version,
    about = "Compile propositional knowledge into RBMs and reason with them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a knowledge-base file into a model file.
    Compile(CompileArgs),
    /// Search for satisfying assignments by Gibbs sampling.
    Solve(SolveArgs),
    /// Rank completions of the free variables by exact probability.
    Rank(RankArgs),
    /// Print every assignment with its truth value and energies.
    Enumerate(EnumerateArgs),
    /// Train a model discriminatively on a CSV dataset.
    Train(TrainArgs),
    /// Coverage and timing benchmarks on the conjunction-disjunction family.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    /// Knowledge base: one `[weight :] formula` per line.
    pub kb: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Weight of rules written without one.
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    /// Only merge identical clauses; keep clauses a more general one subsumes.
    #[arg(long)]
    pub no_subsumption: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Evidence such as `n=1,q=0`.
    #[arg(long, default_value = "")]
    pub clamp: String,
    #[arg(long, default_value_t = 100_000)]
    pub max_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub confidence: f64,
    /// Margin for the acceptance threshold; defaults to the model's.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    /// Linear anneal from this temperature down to --temperature.
    #[arg(long)]
    pub anneal_from: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub burn_in: u64,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Stop after this many distinct accepted assignments.
    #[arg(long)]
    pub target: Option<usize>,
    /// Stop after this many seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

impl SamplingArgs {
    fn config(&self, model_epsilon: f64) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            max_samples: self.max_samples,
            burn_in: self.burn_in,
            chains: self.chains,
            temperature: self.temperature,
            confidence: self.confidence,
            epsilon: self.epsilon.unwrap_or(model_epsilon),
            target: self.target,
            anneal_from: self.anneal_from,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            ..SamplerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Write one CSV row per sample to this file.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    pub model: PathBuf,
    #[arg(long, default_value = "")]
    pub clamp: String,
    #[arg(long, default_value_t = 5.0)]
    pub confidence: f64,
    /// Print only the most probable completions.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortKey {
    Truth,
    Energy,
    FreeEnergy,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// A knowledge-base file, or a model file (JSON).
    pub input: PathBuf,
    /// Cross-check: compare the knowledge base against this model.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Row order; lexicographic when omitted.
    #[arg(long, value_enum)]
    pub by: Option<SortKey>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5.0)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// CSV with a header naming the variables; cells are 0 or 1.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON naming the target columns; defaults to the data path with a `.json` extension.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Comma-separated target columns (overrides --spec).
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<String>,
    /// Knowledge base used to initialise the model.
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// Held-out CSV for reporting accuracy.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 50)]
    pub extra_hidden: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub init_scale: f64,
    #[arg(long, default_value_t = 5.0)]
    pub confidence: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Coverage and accuracy curves over independent runs.
    Coverage(CoverageArgs),
    /// Time to full coverage for several disjunction sizes.
    Timing(TimingArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Conjoined variables.
    #[arg(long, short = 'm', default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_samples: u64,
    #[arg(long, default_value_t = 5.0)]
    pub confidence: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Allow formulas beyond M=10, N=5; such runs can take hours.
    #[arg(long)]
    pub full_scale: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl FamilyArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            max_samples: self.max_samples,
            chains: self.chains,
            temperature: self.temperature,
            confidence: self.confidence,
            epsilon: self.epsilon,
            ..SamplerConfig::default()
        }
    }

    fn check_scale(&self, n: usize) -> Result<()> {
        if !self.full_scale && (self.m > DESK_M || n > DESK_N) {
            return Err(Error::InvalidArgument(format!(
                "M={} N={n} exceeds desk scale (M<={DESK_M}, N<={DESK_N}); pass --full-scale to run it",
                self.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Disjoined variables.
    #[arg(long, short = 'n', default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_CADENCE)]
    pub cadence: u64,
    /// Stop each run once every satisfying assignment was found.
    #[arg(long)]
    pub stop_at_full: bool,
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Disjunction sizes, comma-separated.
    #[arg(long, short = 'n', value_delimiter = ',', default_values_t = [2, 3, 4])]
    pub n: Vec<usize>,
    /// Per-run timeout in seconds; unfinished runs are reported as censored.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[command(flatten)]
    pub family: FamilyArgs,
}

/// Parses arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    if e.is_guard() {
        EXIT_GUARD
    } else {
        EXIT_USAGE
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("LBM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs one command, writing results to `out`. Returns the exit code.
pub fn run(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Compile(a) => cmd_compile(&a, out),
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Rank(a) => cmd_rank(&a, out),
        Command::Enumerate(a) => cmd_enumerate(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Bench(BenchCommand::Coverage(a)) => cmd_bench_coverage(&a, out),
        Command::Bench(BenchCommand::Timing(a)) => cmd_bench_timing(&a, out),
    }
}

fn read_kb(path: &Path) -> Result<KnowledgeBase> {
    parse_kb(&fs::read_to_string(path)?)
}

struct Loaded {
    model: RbmModel,
    vars: VarTable,
    clauses: Option<Vec<WeightedClause>>,
}

fn load_model(path: &Path) -> Result<Loaded> {
    let file = ModelFile::load(path)?;
    Ok(Loaded {
        model: file.model()?,
        vars: file.vars()?,
        clauses: file.clauses()?,
    })
}

/// Compiled model for a knowledge base. A knowledge base with no
/// satisfiable clause compiles to a model without hidden units.
fn compile_kb(
    kb: &KnowledgeBase,
    epsilon: f64,
    weight: f64,
    opts: MergeOptions,
) -> Result<(RbmModel, WeightedClauseSet)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let ws = kb_clauses(kb, weight, opts)?;
    if ws.is_empty() {
        let mut m = RbmModel::zeros(kb.vars.len(), 0);
        m.epsilon = epsilon;
        return Ok((m, ws));
    }
    Ok((compile_weighted(&ws, epsilon)?.model, ws))
}

fn clause_text(c: &WeightedClause, vars: &VarTable) -> String {
    c.clause
        .literals()
        .map(|l| {
            let name = vars.name(l.var).unwrap_or("?");
            if l.positive {
                name.to_string()
            } else {
                format!("~{name}")
            }
        })
        .collect::<Vec<_>>()
        .join(" & ")
}

fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> Result<u8> {
    let kb = read_kb(&a.kb)?;
    let opts = MergeOptions {
        subsumption: !a.no_subsumption,
    };
    let (model, ws) = compile_kb(&kb, a.epsilon, a.weight, opts)?;
    if ws.is_empty() {
        eprintln!("warning: the knowledge base has no satisfiable clause; the model has no hidden units");
    }
    ModelFile::new(&model, Some(ws.entries()), &kb.vars).save(&a.out)?;
    writeln!(out, "hidden,weight,clause")?;
    for (j, c) in ws.entries().iter().enumerate() {
        writeln!(out, "{j},{},{}", c.weight, clause_text(c, &kb.vars))?;
    }
    eprintln!(
        "{} rules, {} variables, {} hidden units -> {}",
        kb.rules.len(),
        kb.vars.len(),
        model.n_hidden,
        a.out.display()
    );
    Ok(EXIT_OK)
}

fn header(vars: &VarTable, extra: &[&str]) -> String {
    vars.names()
        .iter()
        .map(String::as_str)
        .chain(extra.iter().copied())
        .collect::<Vec<_>>()
        .join(",")
}

fn bits_csv(bits: &[u8]) -> String {
    bits.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<u8> {
    let loaded = load_model(&a.model)?;
    let ev = Evidence::parse(&a.sampling.clamp, &loaded.vars)?;
    let cfg = a.sampling.config(loaded.model.epsilon);
    eprintln!("seed: {}", cfg.seed);
    let log = match &a.log {
        Some(path) => {
            let mut sink = io::BufWriter::new(fs::File::create(path)?);
            let log = search_logged(&loaded.model, &ev, &cfg, Some(&mut sink), None)?;
            sink.flush()?;
            log
        }
        None => search_logged(&loaded.model, &ev, &cfg, None, None)?,
    };
    writeln!(out, "{}", header(&loaded.vars, &["free_energy", "first_seen"]))?;
    for (assignment, acc) in &log.accepted {
        let f = loaded.model.free_energy(assignment.bits(), cfg.confidence)?;
        writeln!(out, "{},{f},{}", bits_csv(assignment.bits()), acc.first_seen)?;
    }
    eprintln!(
        "{} accepted of {} samples in {:.3}s (threshold {:.6}, stop: {:?})",
        log.accepted.len(),
        log.samples_drawn,
        log.wall_time.as_secs_f64(),
        cfg.threshold(),
        log.stop
    );
    Ok(if log.accepted.is_empty() {
        EXIT_NO_RESULT
    } else {
        EXIT_OK
    })
}

fn cmd_rank(a: &RankArgs, out: &mut dyn Write) -> Result<u8> {
    let loaded = load_model(&a.model)?;
    let ev = Evidence::parse(&a.clamp, &loaded.vars)?;
    let ranked = rank_exact(&loaded.model, &ev, a.confidence)?;
    writeln!(out, "{}", header(&loaded.vars, &["free_energy", "probability"]))?;
    for r in ranked.iter().take(a.top.unwrap_or(usize::MAX)) {
        writeln!(
            out,
            "{},{},{}",
            bits_csv(r.assignment.bits()),
            r.free_energy,
            r.probability
        )?;
    }
    Ok(EXIT_OK)
}

struct Row {
    bits: Vec<u8>,
    truth: Option<u8>,
    min_energy: f64,
    free_energy: f64,
}

fn cmd_enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> Result<u8> {
    let text = fs::read_to_string(&a.input)?;
    let is_model = a.input.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');

    // Knowledge base (if any), the model to evaluate, and its variables.
    let (kb, loaded) = if is_model {
        if a.model.is_some() {
            return Err(Error::InvalidArgument(
                "cross-checking needs a knowledge-base file as input".into(),
            ));
        }
        let file = ModelFile::from_json(&text)?;
        (
            None,
            Loaded {
                model: file.model()?,
                vars: file.vars()?,
                clauses: file.clauses()?,
            },
        )
    } else {
        let mut kb = parse_kb(&text)?;
        let loaded = match &a.model {
            Some(path) => {
                let loaded = load_model(path)?;
                // Read the rules against the model's variable order.
                kb = parse_kb_with(&text, loaded.vars.clone())?;
                if kb.vars.len() != loaded.vars.len() {
                    let extra = kb.vars.names()[loaded.vars.len()..].join(", ");
                    return Err(Error::UnknownVariable(extra));
                }
                loaded
            }
            None => {
                let (model, ws) = compile_kb(&kb, a.epsilon, 1.0, MergeOptions::default())?;
                Loaded {
                    model,
                    vars: kb.vars.clone(),
                    clauses: Some(ws.entries().to_vec()),
                }
            }
        };
        (Some(kb), loaded)
    };
    let n = loaded.vars.len();
    if n > RANK_LIMIT {
        return Err(Error::EnumerationGuard {
            vars: n,
            limit: RANK_LIMIT,
        });
    }
    debug!("enumerating {} assignments", 1u64 << n);

    let eps = loaded.model.epsilon;
    let mut mismatches = 0usize;
    let mut rows = Vec::with_capacity(1 << n);
    for k in 0..1u64 << n {
        let bits = Assignment::from_index(n, k).into_bits();
        let (min_energy, _) = loaded.model.min_energy(&bits)?;
        let free_energy = loaded.model.free_energy(&bits, a.confidence)?;
        let truth = kb
            .as_ref()
            .map(|kb| kb.rules.iter().all(|r| r.formula.eval_bits(&bits)) as u8);
        if let (Some(kb), Some(_)) = (&kb, &a.model) {
            // The model's score must be the weighted count of satisfied rules.
            let expected: f64 = kb
                .rules
                .iter()
                .filter(|r| r.formula.eval_bits(&bits))
                .map(|r| r.weight.unwrap_or(1.0))
                .sum();
            let score = -min_energy / eps;
            if (score - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                mismatches += 1;
                eprintln!(
                    "mismatch at {}: rules give {expected}, model gives {score}",
                    bits_csv(&bits)
                );
            }
        }
        rows.push(Row {
            bits,
            truth,
            min_energy,
            free_energy,
        });
    }
    match a.by {
        None => {}
        Some(SortKey::Truth) => rows.sort_by_key(|r| std::cmp::Reverse(r.truth)),
        Some(SortKey::Energy) => rows.sort_by(|x, y| x.min_energy.total_cmp(&y.min_energy)),
        Some(SortKey::FreeEnergy) => rows.sort_by(|x, y| x.free_energy.total_cmp(&y.free_energy)),
    }
    writeln!(out, "{}", header(&loaded.vars, &["truth", "min_energy", "free_energy"]))?;
    for r in &rows {
        let truth = r.truth.map(|t| t.to_string()).unwrap_or_default();
        writeln!(out, "{},{truth},{},{}", bits_csv(&r.bits), r.min_energy, r.free_energy)?;
    }
    if let Some(c) = &loaded.clauses {
        info!("{} hidden units, {} mapped to clauses", loaded.model.n_hidden, c.len());
    }
    if a.model.is_some() {
        eprintln!("{mismatches} mismatches over {} assignments", rows.len());
        if mismatches > 0 {
            return Err(Error::InvalidArgument(format!(
                "model disagrees with the knowledge base on {mismatches} assignments"
            )));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> Result<u8> {
    let spec = if a.targets.is_empty() {
        let path = a.spec.clone().unwrap_or_else(|| a.data.with_extension("json"));
        DatasetSpec::load(&path).map_err(|e| {
            Error::InvalidArgument(format!("no --targets given and cannot read {}: {e}", path.display()))
        })?
    } else {
        DatasetSpec {
            targets: a.targets.clone(),
        }
    };
    let data = Dataset::load(&a.data, &spec)?;
    let cfg = TrainConfig {
        learning_rate: a.learning_rate,
        epochs: a.epochs,
        batch_size: a.batch_size,
        n_extra_hidden: a.extra_hidden,
        seed: a.seed,
        init_scale: a.init_scale,
        confidence: a.confidence,
        ..TrainConfig::default()
    };
    eprintln!("seed: {}", cfg.seed);
    let knowledge = match &a.kb {
        Some(path) => {
            let kb = parse_kb_with(&fs::read_to_string(path)?, data.vars.clone())?;
            if kb.vars.len() != data.vars.len() {
                let extra = kb.vars.names()[data.vars.len()..].join(", ");
                return Err(Error::UnknownVariable(extra));
            }
            kb_clauses(&kb, 1.0, MergeOptions::default())?
        }
        None => WeightedClauseSet::default(),
    };
    let init = learn::init_from_knowledge(&knowledge, data.vars.len(), &cfg)?;
    eprintln!(
        "initial accuracy {:.4} ({} knowledge units, {} random)",
        learn::accuracy(&init, &data, cfg.confidence)?,
        knowledge.len(),
        cfg.n_extra_hidden
    );
    let trained = learn::train_discriminative(&init, &data, &cfg)?;
    writeln!(out, "epoch,loss")?;
    for (e, loss) in trained.losses.iter().enumerate() {
        writeln!(out, "{},{loss}", e + 1)?;
    }
    eprintln!(
        "training accuracy {:.4}",
        learn::accuracy(&trained.model, &data, cfg.confidence)?
    );
    if let Some(test) = &a.test {
        let test = Dataset::load(test, &spec)?;
        if test.vars != data.vars {
            return Err(Error::InvalidArgument(
                "test columns differ from training columns".into(),
            ));
        }
        eprintln!(
            "test accuracy {:.4}",
            learn::accuracy(&trained.model, &test, cfg.confidence)?
        );
    }
    ModelFile::new(&trained.model, None, &data.vars).save(&a.out)?;
    Ok(EXIT_OK)
}

fn with_output(
    dest: &Option<PathBuf>,
    out: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match dest {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            write(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => write(out),
    }
}

fn cmd_bench_coverage(a: &CoverageArgs, out: &mut dyn Write) -> Result<u8> {
    let fam = &a.family;
    fam.check_scale(a.n)?;
    let pf = PipelineFormula::new(fam.m, a.n)?;
    let mut cfg = fam.config();
    if a.stop_at_full {
        cfg.target = Some(pf.model_count() as usize);
    }
    eprintln!("seed: {}", cfg.seed);
    let report = bench::run_coverage(pf, &cfg, fam.runs, a.cadence)?;
    with_output(&fam.out, out, |w| report.write_csv(w))?;
    if let Some(last) = report.summary.last() {
        eprintln!(
            "M={} N={}: final coverage {:.4} +- {:.4}, accuracy {:.4} +- {:.4}; {}/{} runs reached full coverage",
            pf.m,
            pf.n,
            last.coverage_mean,
            last.coverage_sd,
            last.accuracy_mean,
            last.accuracy_sd,
            report.full_coverage_runs(),
            report.runs.len()
        );
    }
    if let Some(ratio) = report.search_space_ratio() {
        eprintln!("mean samples to full coverage / 2^(M+N) = {:.6}", ratio);
    }
    if report.vacuous {
        eprintln!("no samples drawn: accuracy reported as 1 over an empty accepted set");
    }
    Ok(EXIT_OK)
}

fn cmd_bench_timing(a: &TimingArgs, out: &mut dyn Write) -> Result<u8> {
    let fam = &a.family;
    for &n in &a.n {
        fam.check_scale(n)?;
    }
    let cfg = fam.config();
    eprintln!("seed: {}", cfg.seed);
    let rows = bench::run_timing(fam.m, &a.n, &cfg, fam.runs, a.timeout.map(Duration::from_secs_f64))?;
    with_output(&fam.out, out, |w| bench::write_timing_csv(&rows, w))?;
    for &n in &a.n {
        let done: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n && !r.censored)
            .map(|r| r.seconds)
            .collect();
        let censored = rows.iter().filter(|r| r.n == n && r.censored).count();
        let mean = if done.is_empty() {
            f64::NAN
        } else {
            done.iter().sum::<f64>() / done.len() as f64
        };
        eprintln!(
            "M={} N={n}: mean {:.6}s over {} runs, {censored} censored",
            fam.m,
            mean,
            done.len()
        );
    }
    Ok(EXIT_OK)
}
