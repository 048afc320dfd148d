//! `adapted-geom`: validate and classify almost contact metric structures
//! given in adapted coordinates.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit statuses. Values from 64 up follow the BSD `sysexits` layout.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION_FAILED: u8 = 1;
    pub const STRICT_FAIL: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const NO_INPUT: u8 = 66;
    pub const BAD_POINT: u8 = 67;
    pub const EVALUATION: u8 = 70;
    pub const CANNOT_WRITE: u8 = 73;
}

#[derive(Debug, Parser)]
#[command(name = "adapted-geom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structure axioms on the sample grid.
    Validate { file: PathBuf },
    /// Evaluate every classification predicate on the sample grid.
    Classify {
        file: PathBuf,
        /// Write the JSON report to this path (`-` for standard output).
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Exit with status 2 if any predicate fails.
        #[arg(long)]
        strict: bool,
    },
    /// Print or write a gallery structure as a structure file.
    Builtin {
        /// One of darboux_r3, darboux_r5, conformal_r3, twisted_r3.
        name: String,
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Print intrinsic objects at one point.
    Eval {
        file: PathBuf,
        /// Comma-separated coordinates, one per dimension.
        #[arg(long, value_name = "V1,..,VN", allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum)]
        what: Quantity,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Omega,
    Nijenhuis,
    Christoffel,
    ExtendMetric,
}

/// Failure carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ADAPTED_GEOM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::new(
            exit::USAGE,
            format!("ADAPTED_GEOM_THREADS must be a positive integer, got {raw:?}"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::new(exit::USAGE, format!("cannot configure worker threads: {e}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Validate { file } => commands::validate(&file),
        Command::Classify { file, json, strict } => {
            commands::classify(&file, json.as_deref(), strict)
        }
        Command::Builtin { name, emit } => commands::builtin(&name, emit.as_deref()),
        Command::Eval { file, point, what } => commands::eval(&file, &point, what),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
