mod build;
mod classify;
mod demo;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qcausal",
    version,
    about = "Causality and localizability of bipartite quantum operations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a channel or basis file.
    Classify {
        path: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Base tolerance for matrix comparisons.
        #[arg(long, default_value_t = qcausal::tensor::TOL)]
        tol: f64,
        /// Random restarts for the signaling search.
        #[arg(long, default_value_t = 32)]
        budget: usize,
    },
    /// Run one of the protocol or game demonstrations.
    Demo(demo::DemoArgs),
    /// Write a channel or basis in the shared JSON format.
    Build(build::BuildArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Literal,
    Optimized,
}

impl From<Mode> for qcausal::protocols::SemilocalMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Literal => qcausal::protocols::SemilocalMode::Literal,
            Mode::Optimized => qcausal::protocols::SemilocalMode::Optimized,
        }
    }
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, or bad arguments: exit 2.
    Usage(String),
    /// Input that parses but violates an invariant: exit 3.
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) => f.write_str(m),
        }
    }
}

impl From<qcausal::Error> for Failure {
    fn from(e: qcausal::Error) -> Self {
        use qcausal::Error::*;
        match e {
            InvalidInput(_)
            | DimensionMismatch { .. }
            | NotSquare { .. }
            | RaggedKraus
            | EmptyChannel
            | InvalidPauli(_) => Failure::Usage(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub fn read_artifact(path: &std::path::Path) -> CliResult<qcausal::fixtures::Artifact> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(qcausal::fixtures::Artifact::from_json(&text)?)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Classify {
            path,
            json,
            seed,
            tol,
            budget,
        } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
            }
            let opts = qcausal::report::ClassifyOptions { seed, budget, tol };
            classify::run(&path, &opts, json)
        }
        Command::Demo(args) => demo::run(args),
        Command::Build(args) => build::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
