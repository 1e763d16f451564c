use crate::manifest::{manifest_path, RunManifest};
use argnn::dataset::{build_dataset, read_apx_dir, write_jsonl, Task};
use argnn::solver::Semantics;
use argnn::Result;
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct MakeDatasetArgs {
    /// Task: credulous, sceptical, or constructive.
    #[arg(long)]
    pub task: Task,
    /// Semantics: grd, com, prf, or stb.
    #[arg(long)]
    pub semantics: Semantics,
    /// Directory of APX files.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output JSONL dataset.
    #[arg(long)]
    pub out: PathBuf,
    /// Sampling seed for constructive given sets; unused otherwise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: MakeDatasetArgs) -> Result<()> {
    let started = Instant::now();
    let named = read_apx_dir(&args.input)?;
    let afs: Vec<_> = named.into_iter().map(|(_, af)| af).collect();
    let (records, stats) = build_dataset(&afs, args.task, args.semantics, args.seed)?;
    write_jsonl(&args.out, &records)?;

    let mut manifest = RunManifest::new(
        "make-dataset",
        json!({
            "task": args.task,
            "semantics": args.semantics,
            "in": args.input.display().to_string(),
            "out": args.out.display().to_string(),
            "seed": args.seed,
        }),
        Some(args.seed),
    );
    manifest.input_dir(&args.input, "apx")?;
    manifest.output_file(&args.out)?;
    manifest.details = serde_json::to_value(stats)?;
    manifest.write(&manifest_path(&args.out), started)?;
    eprintln!(
        "labelled {} frameworks into {} records at {}",
        stats.frameworks,
        stats.records,
        args.out.display()
    );
    Ok(())
}
