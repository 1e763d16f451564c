use crate::manifest::{manifest_path, RunManifest};
use argnn::dataset::build_dataset;
use argnn::generate::{generate_corpus, Family, GeneratorConfig};
use argnn::train::{load_checkpoint, scaling_csv, scaling_eval};
use argnn::Result;
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct ScalingArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Framework sizes to probe, e.g. 15,25,50. Each size gets a fresh
    /// exactly-labelled corpus under the checkpoint's task and semantics.
    #[arg(long)]
    pub sizes: String,
    /// Inference step counts, e.g. 2,4,8,16,32; may exceed the trained
    /// horizon.
    #[arg(long)]
    pub steps: String,
    /// Frameworks per size.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value = "mixed")]
    pub family: Family,
    /// Corpus seed; each size derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix: writes PREFIX.json and PREFIX.csv plus a manifest.
    /// CSV goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: ScalingArgs) -> Result<()> {
    let started = Instant::now();
    let checkpoint = load_checkpoint(&args.checkpoint)?;
    let sizes = super::parse_usize_list(&args.sizes, "size")?;
    let steps = super::parse_usize_list(&args.steps, "step count")?;

    let task = checkpoint.config.task;
    let semantics = checkpoint.config.semantics;
    let mut datasets = Vec::with_capacity(sizes.len());
    for &size in &sizes {
        // Disjoint seeds keep the per-size corpora independent.
        let seed = args.seed.wrapping_add(size as u64);
        let config = GeneratorConfig::new(args.family, size, size, args.count, seed);
        let corpus = generate_corpus(&config)?;
        let (records, _) = build_dataset(&corpus.afs, task, semantics, seed)?;
        eprintln!("size {size}: {} frameworks, {} records", corpus.afs.len(), records.len());
        datasets.push((format!("n{size}"), records));
    }

    let cells = scaling_eval(&checkpoint.params, &datasets, &steps)?;
    let csv = scaling_csv(&cells);
    let mut cells_json = serde_json::to_string_pretty(&cells)?;
    cells_json.push('\n');

    match &args.out {
        None => print!("{csv}"),
        Some(prefix) => {
            let json_path = prefix.with_extension("json");
            let csv_path = prefix.with_extension("csv");
            std::fs::write(&json_path, &cells_json)?;
            std::fs::write(&csv_path, &csv)?;
            let mut manifest = RunManifest::new(
                "scaling-eval",
                json!({
                    "checkpoint": args.checkpoint.display().to_string(),
                    "sizes": sizes,
                    "steps": steps,
                    "count": args.count,
                    "family": args.family,
                    "seed": args.seed,
                    "task": task,
                    "semantics": semantics,
                }),
                Some(args.seed),
            );
            manifest.input_file(&args.checkpoint)?;
            manifest.output_file(&json_path)?;
            manifest.output_file(&csv_path)?;
            manifest.details = json!({ "cells": cells.len() });
            manifest.write(&manifest_path(&csv_path), started)?;
            print!("{csv}");
        }
    }
    Ok(())
}
