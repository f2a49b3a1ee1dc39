//! `qpl`: command-line front end for the primal logic engine.
//!
//! Exit status is 0 when a question was decided (whatever the answer), 2 on
//! malformed input and 3 when a resource cap stopped the computation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpl::calculus::CalculusVariant;
use qpl::closure::DEFAULT_CLOSURE_CAP;
use qpl::semantics::DEFAULT_ORACLE_CAP;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "qpl",
    version,
    about = "Decide entailment in quantified primal logic and its sublogics"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Calculus: orig, l1, l2, pfqpl or qpl.
    #[arg(long, global = true, default_value = "qpl")]
    pub variant: CalculusVariant,
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized commands; required with --json.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum number of closure formulas.
    #[arg(long, global = true, default_value_t = DEFAULT_CLOSURE_CAP, value_parser = positive_usize)]
    pub closure_cap: usize,
    /// Maximum base-2 exponent of the brute-force semantic search.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP, value_parser = positive_u32)]
    pub oracle_cap: u32,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u32(s: &str) -> Result<u32, String> {
    positive_usize(s).and_then(|n| u32::try_from(n).map_err(|e| e.to_string()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the hypotheses entail each query.
    Check(CheckArgs),
    /// Decide one query and write its derivation.
    Prove(ProveArgs),
    /// Print the closure of a formula file with its size statistics.
    Closure { file: PathBuf },
    /// Decide semantic consequence by enumerating structures and overrides.
    Oracle { hyps: PathBuf, query: String },
    /// Check a derivation file against a hypothesis file.
    VerifyProof {
        hyps: PathBuf,
        proof: PathBuf,
        /// Formula the root must be labelled with.
        #[arg(long)]
        query: Option<String>,
    },
    /// Compare infon terms, e.g. `a + b` and `a * b`.
    Algebra {
        #[arg(value_enum)]
        relation: AlgebraRelation,
        left: String,
        right: String,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Time the decision procedure on a scaling family.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Hypothesis file: one formula per line, `@vars` declares free variables.
    pub hyps: PathBuf,
    /// Query formulas.
    pub queries: Vec<String>,
    /// Additional queries, one per line.
    #[arg(long)]
    pub queries_file: Option<PathBuf>,
    /// Write derivations of entailed queries here.
    #[arg(long)]
    pub proof: Option<PathBuf>,
    /// Write countermodels of non-entailed queries here.
    #[arg(long)]
    pub countermodel: Option<PathBuf>,
    /// Write proofs as trees instead of shared DAGs.
    #[arg(long)]
    pub expand_tree: bool,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    pub hyps: PathBuf,
    pub query: String,
    #[arg(long)]
    pub proof: PathBuf,
    #[arg(long)]
    pub expand_tree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AlgebraRelation {
    Geq,
    Equal,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Universal Horn clauses, with the classical verdict on `false`.
    Horn {
        #[arg(long, default_value_t = 6)]
        clauses: usize,
        #[arg(long, default_value_t = 4)]
        relations: usize,
        #[arg(long, default_value_t = 2)]
        constants: usize,
        #[arg(long, default_value_t = 3)]
        max_bound_vars: usize,
    },
    /// A two-register machine, and its bounded halting instance with --bound.
    Machine {
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Random hypotheses and queries for the selected variant.
    Random {
        #[arg(long, default_value_t = 3)]
        hyps: usize,
        #[arg(long, default_value_t = 2)]
        queries: usize,
        #[arg(long, default_value_t = 2)]
        constants: usize,
        #[arg(long, default_value_t = 2)]
        max_quantifiers: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        /// Let the variable `z` occur free.
        #[arg(long)]
        free_var: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// `p0, p0 -> p1, ..., p(k-1) -> pk` with query `pk`.
    Chain {
        /// Total input size in symbols.
        #[arg(long)]
        n: usize,
        /// Runs; the fastest is reported.
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn resource(e: impl std::fmt::Display) -> Self {
        CliError::Resource(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
