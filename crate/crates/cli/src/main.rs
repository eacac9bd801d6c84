//! `ricciflat`: exact Ricci curvature reports, flatness checks, local
//! classification, the graph atlas, table verification and the flat-graph
//! search.
//!
//! Exit codes: 0 success or flat, 1 not flat or a verification/search
//! mismatch, 2 unreadable input, 3 usage error or unmet hypothesis,
//! 4 internal failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ricciflat::search::Mode;
use ricciflat::Rational;

#[derive(Parser)]
#[command(name = "ricciflat", version, about = "Exact Lin-Lu-Yau Ricci curvature and Ricci-flat graph search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Options shared by every subcommand.
#[derive(Args, Clone)]
pub struct Common {
    /// Output format. Reports default to json; atlas defaults to edgelist.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Leave the timestamp and run timings out of JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Add a decimal approximation next to every curvature value.
    #[arg(long, global = true)]
    pub decimal: bool,
    /// Worker threads for curvature and search.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub jobs: Option<u64>,
    /// Progress messages on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand)]
pub enum Command {
    /// Curvature of every edge, or of one edge, with optional α samples.
    Curvature {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        edge: Option<Vec<usize>>,
        /// Idleness value `p/q` in [0, 1] to sample `W` and the quotient at.
        #[arg(long, value_name = "P/Q", value_parser = parse_alpha)]
        alpha: Vec<Rational>,
    },
    /// Exit 0 if every edge has curvature exactly zero, 1 otherwise.
    CheckFlat {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Local structure class of one edge.
    Classify {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
        edge: Vec<usize>,
    },
    /// Export a named graph.
    Atlas {
        /// cycle, path, complete, petersen, dodecahedral, half_dodecahedral,
        /// r1, r2 or diamond_necklace.
        name: String,
        /// Size parameter of the parametrized families.
        parameter: Option<usize>,
        /// Write to a file instead of stdout.
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Recompute the local-structure tables or the atlas expectations.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Search for Ricci-flat graphs of girth four with vertex-disjoint 4-cycles.
    Search {
        #[arg(long, value_parser = parse_mode, default_value = "brute")]
        mode: Mode,
        /// Vertex bound for brute mode (default 12); vertex guard for guided
        /// mode (default 24).
        #[arg(long, value_name = "N")]
        max_vertices: Option<usize>,
        /// Brute mode only: save progress here and resume from it.
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
pub struct GraphInput {
    /// Graph file: edgelist, or graph6 when the name ends in .g6. `-` reads stdin.
    pub file: PathBuf,
    /// Override the format inferred from the file name.
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub input_format: Option<InputFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
    Dot,
    Edgelist,
    Graph6,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Edgelist,
    Graph6,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Tables,
    Atlas,
}

fn parse_alpha(s: &str) -> Result<Rational, String> {
    let a = ricciflat::rational::parse(s).ok_or_else(|| format!("{s:?} is not a rational p/q"))?;
    if a < ricciflat::rational::zero() || a > ricciflat::rational::one() {
        return Err(format!("{s} is outside [0, 1]"));
    }
    Ok(a)
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// Failures that end a run with a non-zero exit code other than 1.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Usage(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Usage(m) | Failure::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(j) = cli.common.jobs {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j as usize).build_global();
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
