use crate::manifest::{manifest_path, RunManifest};
use argnn::dataset::{read_jsonl, DatasetRecord};
use argnn::train::{evaluate, load_checkpoint, Checkpoint};
use argnn::{Error, Result};
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// JSONL dataset to score.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Inference steps; the checkpoint's trained step count when omitted.
    /// May exceed the trained count.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Write the report here (and a manifest beside it) as well as stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Records must match what the checkpoint was trained to predict.
pub fn check_records(checkpoint: &Checkpoint, records: &[DatasetRecord]) -> Result<()> {
    for record in records {
        if record.task != checkpoint.config.task
            || record.semantics != checkpoint.config.semantics
        {
            return Err(Error::usage(format!(
                "dataset is {} {} but the checkpoint was trained for {} {}",
                record.task,
                record.semantics,
                checkpoint.config.task,
                checkpoint.config.semantics
            )));
        }
    }
    Ok(())
}

pub fn run(args: EvalArgs) -> Result<()> {
    let started = Instant::now();
    let checkpoint = load_checkpoint(&args.checkpoint)?;
    let records = read_jsonl(&args.dataset)?;
    check_records(&checkpoint, &records)?;
    let steps = args.steps.unwrap_or(checkpoint.config.steps);

    let report = evaluate(&checkpoint.params, &records, steps)?;
    let wall = started.elapsed().as_secs_f64();
    // Reports stay deterministic; timing goes to stderr and the manifest.
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    print!("{text}");
    eprintln!("evaluated {} records in {wall:.2}s", report.records);

    if let Some(path) = &args.out {
        std::fs::write(path, &text)?;
        let mut manifest = RunManifest::new(
            "eval",
            json!({
                "checkpoint": args.checkpoint.display().to_string(),
                "dataset": args.dataset.display().to_string(),
                "steps": steps,
            }),
            None,
        );
        manifest.input_file(&args.checkpoint)?;
        manifest.input_file(&args.dataset)?;
        manifest.output_file(path)?;
        manifest.details = json!({ "mcc": report.mcc, "mae": report.mae });
        manifest.write(&manifest_path(path), started)?;
    }
    Ok(())
}
