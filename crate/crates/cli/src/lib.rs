//! Command-line front end for `loewner-core`: reads a JSON config, runs one
//! computation, and writes a result document, CSV tables and SVG plots.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use loewner_core::Error as CoreError;

/// Exit statuses.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const HYPOTHESIS: i32 = 4;
    pub const CRITERION: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("hypothesis violated: {0} (rerun with --force to proceed)")]
    Hypothesis(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Solver(_) | CliError::Output(_) => exit::SOLVER,
            CliError::Hypothesis(_) => exit::HYPOTHESIS,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_)
            | CoreError::UnboundParameter(_)
            | CoreError::Argument(_)
            | CoreError::DomainMismatch { .. } => CliError::Config(e.to_string()),
            CoreError::Hypothesis(msg) => CliError::Hypothesis(msg),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<loewner_core::expr::ParseError> for CliError {
    fn from(e: loewner_core::expr::ParseError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Evolve,
    Extend,
    Criteria,
    Gallery,
    Alpha,
    Chain,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Extend => "extend",
            Command::Criteria => "criteria",
            Command::Gallery => "gallery",
            Command::Alpha => "alpha",
            Command::Chain => "chain",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "loewner-qc", version, about = "Loewner chains and quasiconformal extension diagnostics")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config document.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Proceed when a sampled hypothesis fails.
    #[arg(long)]
    pub force: bool,
    /// Worker threads for parallel scans.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Run {
    pub outputs: output::Outputs,
    /// Lines echoed to standard output.
    pub summary: Vec<String>,
    pub pass: bool,
}

/// Runs a parsed invocation and returns the exit status.
pub fn run(args: &Args) -> i32 {
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("config error: --threads must be positive");
            return exit::CONFIG;
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = commands::dispatch(args.command, &args.config, args.force)
        .and_then(|r| r.outputs.write_all(&args.out).map(|_| r));
    match result {
        Ok(r) => {
            for line in &r.summary {
                println!("{line}");
            }
            if r.pass {
                exit::PASS
            } else {
                eprintln!("{}: check failed; see {}", args.command.name(), args.out.join("result.json").display());
                exit::CRITERION
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
