//! `gptcheck`: consistency checks for exact-rational GPT instances.
//!
//! Exit status: 0 consistent, 1 inconsistent, 2 unknown (budget exhausted),
//! 3 usage error, 4 input or I/O error, 5 cross-check mismatch.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_USAGE: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "gptcheck", version, about = "Exact consistency checks for generalised probabilistic theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify or refute consistency of the transformations built from a matrix set.
    CheckTransformations(CheckArgs),
    /// Compile a PFA into a generating set document.
    CompilePfa(CompileArgs),
    /// Search for a cut-point or chain witness, or re-verify a replay file.
    Witness(WitnessArgs),
    /// Scan a chain generating set for negative outcome values.
    ChainScan(ChainScanArgs),
    /// Look for a boundedness certificate of a matrix set.
    Certify(CertifyArgs),
    /// Compare the closed-form teleportation channel with tensor contraction.
    TelepDemo(TelepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the JSON document to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Budget {
    /// Longest word length explored.
    #[arg(long)]
    pub max_len: usize,
    /// Maximum number of products explored, the empty word included.
    #[arg(long)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Matrix set or PFA document.
    pub input: PathBuf,
    #[command(flatten)]
    pub budget: Budget,
    /// Largest block length tried for a certificate.
    #[arg(long, default_value_t = 4)]
    pub t_max: usize,
    /// Ball radius of states used for the explicit negative pairing.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    /// Ball radius of effects used for the explicit negative pairing.
    #[arg(long, default_value = "1")]
    pub epsilon_prime: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub input: PathBuf,
    /// Emit the chain generating set instead of the single-system one.
    #[arg(long)]
    pub chain: bool,
    /// Sampled ball points per list (default 2d + 4).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// PFA or chain generating set document.
    #[arg(required_unless_present = "replay")]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "replay")]
    pub max_len: Option<usize>,
    #[arg(long, required_unless_present = "replay")]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Re-verify a replay file instead of searching.
    #[arg(long, conflicts_with = "input")]
    pub replay: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ChainScanArgs {
    /// Chain generating set document.
    pub input: PathBuf,
    #[command(flatten)]
    pub budget: Budget,
    /// Largest block length tried for a certificate; 0 disables it.
    #[arg(long, default_value_t = 4)]
    pub t_max: usize,
    /// Drop the positive 2^-L and effect prefactors from reported values.
    #[arg(long)]
    pub no_scale: bool,
    /// Cross-check closed forms against tensor contraction.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Matrix set or PFA document.
    pub input: PathBuf,
    /// Largest block length t tried.
    #[arg(long)]
    pub max_len: usize,
    #[arg(long)]
    pub budget: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct TelepArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random instances.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Largest subsystem Bloch dimension.
    #[arg(long, default_value_t = 3)]
    pub max_dim: usize,
    #[command(flatten)]
    pub output: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::CheckTransformations(a) => commands::check_transformations(a),
        Command::CompilePfa(a) => commands::compile_pfa(a),
        Command::Witness(a) => commands::witness(a),
        Command::ChainScan(a) => commands::chain_scan(a),
        Command::Certify(a) => commands::certify(a),
        Command::TelepDemo(a) => commands::telep_demo(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
