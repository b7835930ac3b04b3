//! `zrd`: tables of Zernike radial values, Chebyshev connection coefficients and
//! derivative bounds.
//!
//! Exit status: 0 success, 1 a verification check failed, 2 usage error, 3 domain error.

mod commands;
mod render;

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use render::{Format, Output};

#[derive(Parser)]
#[command(name = "zrd", version, about = "Zernike radial polynomials and their derivative bounds")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,
    /// Include exact rational values where they are not shown by default.
    #[arg(long, global = true)]
    exact: bool,
    /// Write output to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Verification(_) => 1,
            Self::Usage(_) => 2,
            Self::Domain(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Domain(m) | Self::Verification(m) => m,
        }
    }
}

impl From<zrd_core::Error> for CliError {
    fn from(e: zrd_core::Error) -> Self {
        match e {
            zrd_core::Error::Domain { .. } => Self::Domain(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

const THREADS_VAR: &str = "ZRD_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Some(raw) = env::var_os(THREADS_VAR) else {
        return Ok(());
    };
    let threads = raw
        .to_str()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn emit(cli: &Cli, output: &Output) -> Result<(), CliError> {
    let bytes = output.render(cli.format).map_err(|e| CliError::Usage(format!("cannot render output: {e}")))?;
    render::write(&bytes, cli.out.as_deref()).map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let output = match &cli.command {
        Command::Eval(args) => commands::eval(args, cli.exact)?,
        Command::Coeffs(args) => commands::coeffs(args)?,
        Command::Bounds(args) => commands::bounds(args)?,
        Command::Sharpness(scenario) => commands::sharpness(scenario)?,
        Command::Verify(args) => {
            let outcome = commands::verify(args)?;
            if let Some(path) = &args.findings {
                let mut json = serde_json::to_vec_pretty(&outcome.report.findings).expect("findings serialize");
                json.push(b'\n');
                std::fs::write(path, json)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(cli, &outcome.output)?;
            if !outcome.report.passed {
                let findings = &outcome.report.findings;
                let mut triples: Vec<String> =
                    findings.iter().filter_map(|f| f.i.map(|i| format!("(n={}, m={}, i={i})", f.n, f.m))).collect();
                triples.dedup();
                let place = if triples.is_empty() {
                    format!("(n={}, m={})", findings[0].n, findings[0].m)
                } else {
                    triples.join(", ")
                };
                return Err(CliError::Verification(format!("{} violation(s) at {place}", findings.len())));
            }
            return Ok(());
        }
    };
    emit(cli, &output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zrd: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
