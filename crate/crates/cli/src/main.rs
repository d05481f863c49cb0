use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use num_bigint::BigInt;

use avsym_cli::{emit_report, exit, run_text, CliError, Command, Format, Options, Report};

/// Exact computations with abelian varieties, finite symplectic groups and
/// Lagrangian sublattices.
#[derive(Parser, Debug)]
#[command(name = "avsym", version)]
struct Args {
    /// One of: snf, group-shape, heisenberg, build-a, lagrangian-check,
    /// pair-lagrangians, find-m, kernel-test, pipeline, random, selftest.
    command: Command,
    /// Instance document (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: Format,
    /// Seed for the random generators; echoed in every report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper bound for the multiplier search.
    #[arg(long)]
    m_max: Option<BigInt>,
    /// Number of random instances.
    #[arg(long)]
    trials: Option<usize>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        seed: args.seed,
        m_max: args.m_max,
        trials: args.trials,
        timing: args.timing,
    };
    let text = match &args.input {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                let err = CliError::Validation {
                    field: "--input".into(),
                    message: format!("cannot read {}: {e}", path.display()),
                };
                let report = Report::error(args.command, &opts, &err);
                print!("{}", emit_report(&report, args.format));
                eprintln!("avsym: {err}");
                return ExitCode::from(exit::INPUT_ERROR as u8);
            }
        },
        None => None,
    };
    let report = run_text(args.command, text.as_deref(), &opts);
    print!("{}", emit_report(&report, args.format));
    if let Some(msg) = report.body.get("error").and_then(|e| e.get("message")) {
        eprintln!("avsym: {}", msg.as_str().unwrap_or_default());
    }
    ExitCode::from(report.exit_code as u8)
}
