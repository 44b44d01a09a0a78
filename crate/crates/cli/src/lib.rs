//! Command-line front end: classify, run, verify and corpus commands.

use std::io::Write;
use std::path::{Path, PathBuf};

use alba_core::classify::find_inductive_certificate;
use alba_core::corpus::{generate, CorpusConfig};
use alba_core::engine::{
    check_compact_appropriate, check_safety, check_topological_adequacy, run, EngineConfig, Mode, RunResult, RunStatus,
};
use alba_core::gentree::build_signed_tree;
use alba_core::models::{equivalence_oracle, interpret_expanded, parse_model, FiniteLE, ModelPool, OracleVerdict};
use alba_core::syntax::{parse_inequality, Inequality, Side, Signature};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "alba", version, about = "Correspondence and canonicity via ALBA over lattice expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Signature file (`conn <name> <fn|fr|gn|gr> <arity> <order-type>` per line).
    #[arg(long, global = true)]
    pub sig: Option<PathBuf>,
    /// Model file; repeatable.
    #[arg(long = "model", global = true)]
    pub models: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Strategic, global = true)]
    pub mode: ModeArg,
    /// Allow non-pivotal approximations.
    #[arg(long, global = true)]
    pub no_pivotal: bool,
    /// Write the step-by-step trace to this file.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    /// Largest lattice enumerated when no model file is given.
    #[arg(long, default_value_t = 5, global = true)]
    pub max_size: usize,
    /// Step cap for exhaustive search.
    #[arg(long, default_value_t = 64, global = true)]
    pub depth: usize,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strategic,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print an inductive certificate or NONE for each inequality.
    Classify {
        inputs: Vec<String>,
        /// Also print the signed generation trees.
        #[arg(long)]
        dump_trees: bool,
    },
    /// Run ALBA and print the resulting pure quasi-inequalities.
    Run { inputs: Vec<String> },
    /// Run ALBA and compare input and output on finite models.
    Verify { inputs: Vec<String> },
    /// Generate random inductive inequalities and run the full pipeline on them.
    Corpus {
        /// Number of inequalities.
        #[arg(default_value_t = 500)]
        count: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
}

struct Style {
    color: bool,
}

impl Style {
    fn from_env() -> Self {
        Style { color: std::env::var("ALBA_COLOR").map(|v| v == "1").unwrap_or(false) }
    }

    fn paint(&self, word: &str, good: bool) -> String {
        match (self.color, good) {
            (false, _) => word.to_string(),
            (true, true) => format!("\x1b[32m{}\x1b[0m", word),
            (true, false) => format!("\x1b[31m{}\x1b[0m", word),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_signature(cli: &Cli) -> Result<Signature, CliError> {
    let path = cli.sig.as_ref().ok_or_else(|| CliError::Config("--sig is required".into()))?;
    Signature::parse(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))
}

fn parse_inputs(inputs: &[String], sig: &Signature) -> Result<Vec<Inequality>, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Config("no input inequalities".into()));
    }
    inputs
        .iter()
        .map(|s| parse_inequality(s, sig).map_err(|e| CliError::Parse(format!("`{}`: {}", s, e))))
        .collect()
}

fn engine_config(cli: &Cli) -> EngineConfig {
    EngineConfig {
        mode: match cli.mode {
            ModeArg::Strategic => Mode::Strategic,
            ModeArg::Exhaustive => Mode::Exhaustive,
        },
        pivotal: !cli.no_pivotal,
        depth_cap: cli.depth,
        ..EngineConfig::default()
    }
}

fn load_models(cli: &Cli, sig: &Signature) -> Result<Vec<(String, FiniteLE)>, CliError> {
    if cli.models.is_empty() {
        let pool = ModelPool::generate(sig, cli.max_size, 64, cli.seed.unwrap_or(0))
            .map_err(|e| CliError::Config(e.to_string()))?;
        return Ok(pool.models.into_iter().enumerate().map(|(i, m)| (format!("enumerated#{}", i + 1), m)).collect());
    }
    cli.models
        .iter()
        .map(|p| {
            let m = parse_model(&read(p)?, sig).map_err(|e| CliError::Parse(format!("{}: {}", p.display(), e)))?;
            let m = interpret_expanded(&m).map_err(|e| CliError::Parse(format!("{}: {}", p.display(), e)))?;
            Ok((p.display().to_string(), m))
        })
        .collect()
}

fn write_trace(cli: &Cli, results: &[RunResult]) -> Result<(), CliError> {
    if let Some(path) = &cli.trace {
        let text: String = results.iter().map(|r| r.trace.render()).collect();
        std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok(())
}

/// Runs one command, writing reports to `out` and diagnostics to `err`.
/// Returns the process exit status.
pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_CONFIG
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let style = Style::from_env();
    let io = |e: std::io::Error| CliError::Io { path: "<stdout>".into(), source: e };
    match &cli.command {
        Command::Classify { inputs, dump_trees } => {
            let sig = load_signature(cli)?;
            for ineq in parse_inputs(inputs, &sig)? {
                match find_inductive_certificate(&ineq).map_err(|e| CliError::Config(e.to_string()))? {
                    Some(c) => writeln!(out, "{} {}", style.paint("INDUCTIVE", true), c),
                    None => writeln!(out, "{}", style.paint("NONE", false)),
                }
                .map_err(io)?;
                if *dump_trees {
                    for side in [Side::Lhs, Side::Rhs] {
                        let tree = build_signed_tree(ineq.side(side), side.root_sign());
                        write!(out, "{}", tree.dump()).map_err(io)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Run { inputs } => {
            let sig = load_signature(cli)?;
            let cfg = engine_config(cli);
            let mut code = EXIT_OK;
            let mut results = Vec::new();
            for ineq in parse_inputs(inputs, &sig)? {
                let r = run(&ineq, &sig, &cfg);
                match &r.status {
                    RunStatus::Success(qs) => {
                        for q in qs {
                            writeln!(out, "{}", q).map_err(io)?;
                        }
                    }
                    RunStatus::Failure(reason) => {
                        writeln!(out, "{} {}", style.paint("FAILURE", false), reason).map_err(io)?;
                        code = EXIT_FAILURE;
                    }
                }
                results.push(r);
            }
            write_trace(cli, &results)?;
            Ok(code)
        }
        Command::Verify { inputs } => {
            let sig = load_signature(cli)?;
            let ineqs = parse_inputs(inputs, &sig)?;
            let models = load_models(cli, &sig)?;
            let cfg = engine_config(cli);
            let mut code = EXIT_OK;
            let mut results = Vec::new();
            for ineq in ineqs {
                let r = run(&ineq, &sig, &cfg);
                let line = match r.outputs() {
                    None => {
                        code = EXIT_FAILURE;
                        format!("{} {:?}", style.paint("FAILURE", false), r.status)
                    }
                    Some(outs) => verify_line(&ineq, outs, &models, &style, &mut code)?,
                };
                writeln!(out, "{}", line).map_err(io)?;
                results.push(r);
            }
            write_trace(cli, &results)?;
            Ok(code)
        }
        Command::Corpus { count } => {
            let seed = cli.seed.ok_or_else(|| CliError::Config("corpus requires --seed".into()))?;
            let corpus = generate(&CorpusConfig { size: *count, seed, ..CorpusConfig::default() });
            let cfg = engine_config(cli);
            let (mut success, mut safe, mut pivotal, mut adequate) = (0, 0, 0, 0);
            let mut results = Vec::new();
            for it in &corpus.items {
                let sig = &corpus.signatures[it.signature];
                let exp = sig.expand();
                let r = run(&it.inequality, sig, &cfg);
                success += r.is_success() as usize;
                safe += check_safety(&r.trace) as usize;
                pivotal += r.trace.all_pivotal() as usize;
                adequate += r
                    .trace
                    .systems
                    .iter()
                    .flat_map(|t| std::iter::once(&t.initial).chain(t.steps.iter().map(|s| &s.after)))
                    .all(|s| check_topological_adequacy(s, &exp) && check_compact_appropriate(s)) as usize;
                if !r.is_success() {
                    writeln!(out, "{} {} :: {:?}", style.paint("FAILURE", false), it.inequality, r.status).map_err(io)?;
                }
                results.push(r);
            }
            let n = corpus.items.len();
            for (label, k) in [("success", success), ("safe", safe), ("pivotal", pivotal), ("adequate", adequate)] {
                writeln!(out, "{} {}/{}", label, k, n).map_err(io)?;
            }
            write_trace(cli, &results)?;
            Ok(if [success, safe, pivotal, adequate].iter().all(|&k| k == n) { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

fn verify_line(
    ineq: &Inequality,
    outs: &[alba_core::syntax::QuasiInequality],
    models: &[(String, FiniteLE)],
    style: &Style,
    code: &mut i32,
) -> Result<String, CliError> {
    let mut assignments = 0u64;
    for (name, m) in models {
        match equivalence_oracle(ineq, outs, m).map_err(|e| CliError::Config(e.to_string()))? {
            OracleVerdict::Equivalent { assignments: a, .. } => assignments += a,
            OracleVerdict::Discrepant { witness, detail, .. } => {
                *code = EXIT_FAILURE;
                return Ok(format!("{} model {} assignment {} :: {}", style.paint("DISCREPANT", false), name, witness, detail));
            }
        }
    }
    let plural = if models.len() == 1 { "" } else { "s" };
    Ok(format!("{} ({} assignments, {} model{})", style.paint("EQUIVALENT", true), assignments, models.len(), plural))
}
