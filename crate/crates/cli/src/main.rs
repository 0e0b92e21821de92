//! `uilog`: batch pipelines over user-interaction logs.
//!
//! Exit status: 0 on success, 1 on operational errors (unreadable input, bad
//! configuration, unknown group), 2 when validation finds violations.

mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Xes,
}

#[derive(Debug, Parser)]
#[command(name = "uilog", version, about = "Convert, check and transform user-interaction logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    /// Input file, `-` for standard input.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Column mapping (TOML) for tabular input; inferred from the header when omitted.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output file, `-` for standard output.
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
    /// Output format; guessed from the file extension, XES by default.
    #[arg(long, value_enum)]
    pub out_format: Option<Format>,
    /// Write the validation report here (JSON lines for `.json`/`.jsonl`).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Refuse to write output that fails validation (exit 2).
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read, optionally segment and abstract, validate and write a log.
    Convert {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Case notion (TOML) to segment with.
        #[arg(long)]
        notion: Option<PathBuf>,
        /// Abstraction rules (TOML) to apply after segmentation.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Check a log against the model invariants.
    Validate {
        #[command(flatten)]
        input: InputArgs,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Count reader and ingestion warnings as findings.
        #[arg(long)]
        strict: bool,
    },
    /// Print attribute coverage and a structural profile.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short, default_value = "-")]
        output: PathBuf,
    },
    /// Group events into cases.
    Segment {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        notion: PathBuf,
    },
    /// Replace in-group runs with task-level events.
    Abstract {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        rules: PathBuf,
    },
    /// Print the XES extension definition.
    Extension {
        #[arg(long, short, default_value = "-")]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert { input, output, notion, rules } => {
            pipeline::convert(&input, &output, notion.as_deref(), rules.as_deref())
        }
        Command::Validate { input, report, strict } => {
            pipeline::validate_cmd(&input, report.as_deref(), strict)
        }
        Command::Stats { input, output } => pipeline::stats(&input, &output),
        Command::Segment { input, output, notion } => {
            pipeline::convert(&input, &output, Some(&notion), None)
        }
        Command::Abstract { input, output, rules } => {
            pipeline::convert(&input, &output, None, Some(&rules))
        }
        Command::Extension { output } => pipeline::extension(&output),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            pipeline::diag(pipeline::Level::Error, &e);
            ExitCode::from(1)
        }
    }
}
