//! `argnn`: one binary over the whole workbench. Subcommands cover corpus
//! generation, exact solving, dataset labelling, training, evaluation,
//! search-based enumeration, and per-step trace dumps.
//!
//! Exit codes: 0 success, 1 usage, 2 runtime failure, 3 resource limit.

mod commands;
mod manifest;

use argnn::dataset::DATASET_SCHEMA_VERSION;
use argnn::train::CHECKPOINT_SCHEMA_VERSION;
use argnn::Error;
use clap::{Parser, Subcommand};
use manifest::MANIFEST_SCHEMA_VERSION;
use std::process::ExitCode;

fn version_string() -> String {
    format!(
        "{} (dataset schema {DATASET_SCHEMA_VERSION}, checkpoint schema \
         {CHECKPOINT_SCHEMA_VERSION}, manifest schema {MANIFEST_SCHEMA_VERSION})",
        env!("CARGO_PKG_VERSION"),
    )
}

#[derive(Parser)]
#[command(
    name = "argnn",
    version = version_string(),
    about = "Abstract argumentation workbench: exact semantics, a learned \
             acceptance model, and extension search",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded corpus of frameworks as APX files.
    Generate(commands::generate::GenerateArgs),
    /// Solve one framework exactly: acceptance maps or extension families.
    Solve(commands::solve::SolveArgs),
    /// Label an APX corpus with exact acceptance into a JSONL dataset.
    MakeDataset(commands::make_dataset::MakeDatasetArgs),
    /// Train the acceptance model from a JSON config file.
    Train(commands::train::TrainArgs),
    /// Evaluate a checkpoint on a dataset (MCC, MAE).
    Eval(commands::eval::EvalArgs),
    /// Evaluate one checkpoint across framework sizes and step counts.
    ScalingEval(commands::scaling::ScalingArgs),
    /// Enumerate extensions by label-guided search and score against truth.
    Enumerate(commands::enumerate::EnumerateArgs),
    /// Dump a per-step forward trace as CSV.
    Trace(commands::trace::TraceArgs),
}

fn run(cli: Cli) -> argnn::Result<()> {
    match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Solve(args) => commands::solve::run(args),
        Command::MakeDataset(args) => commands::make_dataset::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::ScalingEval(args) => commands::scaling::run(args),
        Command::Enumerate(args) => commands::enumerate::run(args),
        Command::Trace(args) => commands::trace::run(args),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) => 1,
        Error::Resource(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not failures.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
