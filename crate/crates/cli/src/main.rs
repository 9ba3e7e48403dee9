mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holder_sharp::Error;

use crate::commands::Report;

#[derive(Parser, Debug)]
#[command(
    name = "holder-sharp",
    version,
    about = "Sharp constants and Bellman functions for strengthened Hölder inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp constants c* and d* for an exponent pair (θ, r).
    Constants(ConstantsArgs),
    /// Evaluate a Bellman function at a point.
    Bellman(BellmanArgs),
    /// Sample the foliation curves in the (y1, y2) square.
    Foliation(FoliationArgs),
    /// Run a seeded Monte-Carlo check of one inequality.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// Summability exponent θ.
    #[arg(long = "theta", visible_alias = "p", allow_negative_numbers = true)]
    pub theta: f64,
    /// Power r of the deficit term.
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    /// Grid size of the numeric suprema.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BellmanKind {
    #[value(name = "c+")]
    CPlus,
    #[value(name = "c-")]
    CMinus,
    #[value(name = "d+")]
    DPlus,
    #[value(name = "d-")]
    DMinus,
}

#[derive(Args, Debug)]
pub struct BellmanArgs {
    /// Which function: c+, c-, d+ or d-.
    #[arg(value_enum)]
    pub kind: BellmanKind,
    /// The point: (x1, x2, x3, x4) for c±, (x1, x3, x4, x5) for d±.
    #[arg(long, num_args = 4, required = true, allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Exponent p > 2.
    #[arg(long = "p", visible_alias = "theta", default_value_t = 3.0)]
    pub p: f64,
    /// Forward-residual tolerance of the foliation inversions.
    #[arg(long, default_value_t = holder_sharp::bellman::DEFAULT_INVERSION_TOL)]
    pub tol: f64,
    /// Cross-check with the brute-force oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Seed of the oracle restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle restarts.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct FoliationArgs {
    /// Exponent p > 2.
    #[arg(long = "p", visible_alias = "theta")]
    pub p: f64,
    /// Samples per curve and number of chords.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Hold3,
    Hold4,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub which: Which,
    /// Summability exponent θ.
    #[arg(long = "theta", visible_alias = "p")]
    pub theta: f64,
    /// Power r of the deficit term.
    #[arg(long)]
    pub r: f64,
    /// Constant c to test in hold3, instead of the sharp one.
    #[arg(long, conflicts_with = "d")]
    pub c: Option<f64>,
    /// Constant d to test in hold4, instead of the sharp one.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid size when the sharp constant comes from a numeric supremum.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidExponent(_) | Error::InvalidRegime(_) => 2,
        Error::Domain(_) | Error::Infeasible(_) | Error::StepFunction(_) => 3,
        Error::NonConvergence { .. } | Error::InvalidCertificate(_) => 4,
    }
}

fn run(cli: &Cli) -> Result<(Report, u8), Error> {
    match &cli.command {
        Command::Constants(a) => commands::constants(a),
        Command::Bellman(a) => commands::bellman(a),
        Command::Foliation(a) => commands::foliation(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match report.render(cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot render report: {e}");
            return ExitCode::from(3);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code)
}
