//! Library side of the `avsym` command-line tool: instance parsing, command
//! dispatch and report rendering. `main.rs` only handles arguments and I/O.

mod commands;
pub mod goldens;
pub mod instance;
mod report;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use avsym_core::symplectic::SymplecticError;

pub use commands::run_command;
pub use instance::{parse_instance, InstanceFile, MorphismBlock};
pub use report::{emit_report, render_text};

/// Exit codes of the tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FALSE_VERDICT: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const SEARCH_EXHAUSTED: i32 = 3;
    pub const THEOREM_VIOLATION: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input at {field}: {message}")]
    Validation { field: String, message: String },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal consistency failure: {0}")]
    TheoremViolation(String),
}

impl CliError {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::SearchExhausted(_) => "search_exhausted",
            CliError::TheoremViolation(_) => "theorem_violation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => exit::INPUT_ERROR,
            CliError::SearchExhausted(_) => exit::SEARCH_EXHAUSTED,
            CliError::TheoremViolation(_) => exit::THEOREM_VIOLATION,
        }
    }

    /// Maps a library error; `field` locates the input that caused it.
    pub fn from_symplectic(e: SymplecticError, field: &str) -> Self {
        match e {
            SymplecticError::SearchExhausted(m) => {
                CliError::SearchExhausted(format!("no transverse multiplier up to {m}"))
            }
            SymplecticError::TheoremViolation(s) => CliError::TheoremViolation(s),
            other => CliError::Validation {
                field: field.to_string(),
                message: other.to_string(),
            },
        }
    }

    fn to_value(&self) -> Value {
        let mut v = json!({ "code": self.code(), "message": self.to_string() });
        match self {
            CliError::Parse { line, column, .. } => {
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            CliError::Validation { field, .. } => v["field"] = json!(field),
            _ => {}
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Snf,
    GroupShape,
    Heisenberg,
    BuildA,
    LagrangianCheck,
    PairLagrangians,
    FindM,
    KernelTest,
    Pipeline,
    Random,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Snf,
        Command::GroupShape,
        Command::Heisenberg,
        Command::BuildA,
        Command::LagrangianCheck,
        Command::PairLagrangians,
        Command::FindM,
        Command::KernelTest,
        Command::Pipeline,
        Command::Random,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Snf => "snf",
            Command::GroupShape => "group-shape",
            Command::Heisenberg => "heisenberg",
            Command::BuildA => "build-a",
            Command::LagrangianCheck => "lagrangian-check",
            Command::PairLagrangians => "pair-lagrangians",
            Command::FindM => "find-m",
            Command::KernelTest => "kernel-test",
            Command::Pipeline => "pipeline",
            Command::Random => "random",
            Command::Selftest => "selftest",
        }
    }

    /// Commands that cannot run without an instance document.
    pub fn needs_input(self) -> bool {
        !matches!(self, Command::Random | Command::Selftest)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected text or json)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub m_max: Option<BigInt>,
    pub trials: Option<usize>,
    /// Adds wall-clock timings to the report.
    pub timing: bool,
}

/// Outcome of a command: an exit code and a JSON body with sorted keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub exit_code: i32,
    pub body: Value,
}

impl Report {
    pub fn error(command: Command, opts: &Options, e: &CliError) -> Self {
        Report {
            command,
            exit_code: e.exit_code(),
            body: json!({
                "command": command.name(),
                "seed": opts.seed,
                "exit_code": e.exit_code(),
                "error": e.to_value(),
            }),
        }
    }
}

/// Parses `text` if given and runs `command`, folding every failure into
/// the report.
pub fn run_text(command: Command, input: Option<&str>, opts: &Options) -> Report {
    let inst = match input.map(parse_instance).transpose() {
        Ok(i) => i,
        Err(e) => return Report::error(command, opts, &e),
    };
    run_command(command, inst.as_ref(), opts)
}
