use crate::manifest::{manifest_path, RunManifest};
use argnn::model::{dump_trace, forward};
use argnn::train::load_checkpoint;
use argnn::Result;
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Inference steps; the checkpoint's trained count when omitted.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Input set, comma-separated names (constructive checkpoints).
    #[arg(long)]
    pub given: Option<String>,
    /// Write the CSV here (and a manifest beside it) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Framework in APX format.
    pub file: PathBuf,
}

pub fn run(args: TraceArgs) -> Result<()> {
    let started = Instant::now();
    let checkpoint = load_checkpoint(&args.checkpoint)?;
    let af = super::read_apx_file(&args.file)?;
    let steps = args.steps.unwrap_or(checkpoint.config.steps);
    let given = match &args.given {
        Some(spec) => Some(af.set_from_names(spec)?),
        None => None,
    };

    let trace = forward(&checkpoint.params, &af, given.as_ref(), steps)?;
    let mut csv: Vec<u8> = Vec::new();
    dump_trace(&trace, &mut csv)?;

    match &args.out {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&csv)?;
        }
        Some(path) => {
            std::fs::write(path, &csv)?;
            let mut manifest = RunManifest::new(
                "trace",
                json!({
                    "checkpoint": args.checkpoint.display().to_string(),
                    "steps": steps,
                    "given": args.given,
                }),
                None,
            );
            manifest.input_file(&args.checkpoint)?;
            manifest.input_file(&args.file)?;
            manifest.output_file(path)?;
            manifest.details = json!({ "arguments": af.n(), "steps": steps });
            manifest.write(&manifest_path(path), started)?;
        }
    }
    Ok(())
}
