//! `pauliverify`: run and inspect single-qubit-measurement verification
//! protocols from JSON files.
//!
//! Exit codes: 0 success, 1 invalid input or a failed selftest, 2 a size cap
//! was exceeded. Errors are printed to stderr as one JSON object.

mod commands;
mod target;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pauliverify::Error;

#[derive(Parser, Debug)]
#[command(name = "pauliverify", version, about = "Verify many-qubit states with single-qubit Pauli measurements")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed (default: drawn from OS entropy and echoed on stderr).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tests per group `k` (verify, robustness); trial count (ppass).
    #[arg(short = 'k', long = "trials", global = true)]
    pub trials: Option<u64>,
    /// Parameter mode.
    #[arg(long, value_enum, global = true)]
    pub mode: Option<ModeArg>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Desk,
    Paper,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a random hypergraph with 2- and 3-edges and write it as JSON.
    GenHypergraph(commands::GenHypergraphArgs),
    /// Stabilizers, R / R_i, condition report and connectivity of a target.
    Inspect(commands::InspectArgs),
    /// Exact single-copy pass probabilities of a state against a target.
    Ppass(commands::PpassArgs),
    /// Run a protocol from a config file and emit the verdict report.
    Verify(commands::VerifyArgs),
    /// Paper-scale (ε, k, m) schedule, in exact integers.
    Params(commands::ParamsArgs),
    /// l1 error budget for IQP sampling from a verified target.
    IqpMargin(commands::IqpMarginArgs),
    /// Acceptance of the i.i.d.-deviated prover over a grid of ε′.
    Robustness(commands::RobustnessArgs),
    /// Run the numerical invariant suites.
    Selftest(commands::SelftestArgs),
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::WidthMismatch { .. } => "width_mismatch",
        Error::CapExceeded { .. } => "cap_exceeded",
        Error::Intractable { .. } => "intractable",
        Error::NotHermitian(_) => "not_hermitian",
        Error::InvalidState(_) => "invalid_state",
        Error::Invalid(_) => "invalid",
        Error::Io { .. } => "io",
        Error::Json(_) => "json",
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PAULIVERIFY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("PAULIVERIFY_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.to_string().trim_end(), 1),
    };
    if let Err(msg) = configure_threads() {
        return report_error("invalid", &msg, 1);
    }
    match commands::dispatch(&cli) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed(msg)) => report_error("check_failed", &msg, 1),
        Err(e) => {
            let code = if e.is_cap() { 2 } else { 1 };
            report_error(error_kind(&e), &e.to_string(), code)
        }
    }
}
