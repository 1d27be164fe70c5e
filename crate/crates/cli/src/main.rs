use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use commands::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "leibniz", version, about = "Exact connection calculus on local pre-Leibniz algebroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the algebroid and run identity suites on its connection.
    Check(CheckArgs),
    /// Compute a tensor or a solution space from a document.
    Compute(ComputeArgs),
    /// Emit a catalog algebroid as a document.
    Example(ExampleArgs),
    /// Re-express a document in a new frame.
    FrameChange(FrameArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for sampled sections and forms.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of sampled sections per identity.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    /// Degree bound of sampled polynomial coefficients.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Largest number of terms any intermediate expression may reach.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    All,
    Classify,
    Admissible,
    Cartan,
    Bianchi,
    Ricci,
    Magic,
    Levicivita,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveArg {
    TorsionFree,
    Koszul,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Also solve for a connection; an infeasible system exits with 3.
    #[arg(long, value_enum)]
    pub solve: Option<SolveArg>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Torsion,
    ProjectedTorsion,
    Curvature,
    Nonmetricity,
    Levicivita,
    Decomposition,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub target: Target,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// Catalog name, e.g. tangent_lie or courant_standard.
    pub kind: String,
    /// Dimension of the base chart.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Form degree of the higher-Courant algebroid.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Frame matrix of a twisted tangent bundle as a JSON array of rows.
    #[arg(long)]
    pub frame: Option<String>,
    /// Component H_123 of the twisting 3-form.
    #[arg(long)]
    pub h: Option<String>,
    /// Document supplying anchor, antisymmetric bracket part and metric for
    /// metric and conformal algebroids.
    #[arg(long)]
    pub from: Option<PathBuf>,
    /// Conformal 1-form components as a JSON array.
    #[arg(long)]
    pub theta: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FrameArgs {
    pub input: PathBuf,
    /// Matrix A with X'_a = A^b_a X_b, as a JSON array of rows indexed by b.
    #[arg(long)]
    pub frame: String,
    #[command(flatten)]
    pub common: Common,
}

fn emit(common: &Common, outcome: &Outcome) -> io::Result<()> {
    let text = match common.format {
        Format::Json => render::jsonl(&outcome.lines),
        Format::Table => render::table(&outcome.lines),
    };
    match &common.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Check(a) => (&a.common, commands::check(a)),
        Command::Compute(a) => (&a.common, commands::compute(a)),
        Command::Example(a) => (&a.common, commands::example(a)),
        Command::FrameChange(a) => (&a.common, commands::frame_change(a)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            return ExitCode::from(code);
        }
    };
    if let Err(e) = emit(common, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code)
}
