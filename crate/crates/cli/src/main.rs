//! `posicert`: certificate search and verification from problem files.
//!
//! Exit status: 0 certified / holds / valid, 1 refuted (Farkas ray or
//! witness), 2 unknown or exhausted, 3 usage or input error, 4 resource or
//! I/O error. `POSICERT_THREADS` sets the worker count.

mod commands;
mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Outcome, EXIT_RESOURCE, EXIT_USAGE};
use problem::ProblemFile;

#[derive(Parser)]
#[command(name = "posicert", version, about = "Exact non-negativity certificates for polynomials")]
struct Cli {
    /// Print the report as JSON (same field names as the text report).
    #[arg(long, global = true)]
    json: bool,
    /// Write the certificate, if any, to this file.
    #[arg(long, global = true, value_name = "PATH")]
    cert: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pólya hierarchy over the orthant.
    CertifyCopositive { problem: PathBuf },
    /// Equality lift for `p ≥ 0` on `S ∩ {h = 0}`; the non-conic lift for `cone: free`.
    CertifyEq { problem: PathBuf },
    /// Inequality lift for `p ≥ 0` on `S ∩ {h ≥ 0}`.
    CertifyIneq { problem: PathBuf },
    /// Degree-2 certificate `σ + λq + μh`.
    CertifyQuadratic { problem: PathBuf },
    /// Horizon-cone condition for `h` (`option condition = eq|ineq`).
    CheckCondition { problem: PathBuf },
    /// Numeric horizon directions of the set.
    HorizonProbe { problem: PathBuf },
    /// Counterexample polynomial for `option direction = …`.
    Counterexample { problem: PathBuf },
    /// Exact check of a certificate against its problem.
    Verify { problem: PathBuf, certificate: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Resource(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Resource(format!("{}: {e}", path.display())))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("POSICERT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("POSICERT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Resource(e.to_string()))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let load = |path: &Path| -> Result<ProblemFile, CliError> { Ok(ProblemFile::parse(&read(path)?)?) };
    match &cli.command {
        Command::CertifyCopositive { problem } => commands::certify_copositive_cmd(&load(problem)?),
        Command::CertifyEq { problem } => commands::certify_eq_cmd(&load(problem)?),
        Command::CertifyIneq { problem } => commands::certify_ineq_cmd(&load(problem)?),
        Command::CertifyQuadratic { problem } => commands::certify_quadratic_cmd(&load(problem)?),
        Command::CheckCondition { problem } => commands::check_condition_cmd(&load(problem)?),
        Command::HorizonProbe { problem } => commands::horizon_probe_cmd(&load(problem)?),
        Command::Counterexample { problem } => commands::counterexample_cmd(&load(problem)?),
        Command::Verify { problem, certificate } => commands::verify_cmd(&load(problem)?, &read(certificate)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let finish = |outcome: Outcome| -> Result<i32, CliError> {
        let text = if cli.json { outcome.report.to_json() } else { outcome.report.to_text() };
        print!("{text}");
        if let Some(path) = &cli.report {
            write(path, &text)?;
        }
        if let (Some(path), Some(cert)) = (&cli.cert, &outcome.certificate) {
            write(path, cert)?;
        }
        Ok(outcome.code)
    };
    let code = match run(&cli).and_then(finish) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code.clamp(0, EXIT_RESOURCE) as u8)
}
