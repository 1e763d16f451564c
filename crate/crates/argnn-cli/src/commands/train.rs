use crate::manifest::RunManifest;
use argnn::dataset::{read_jsonl, Task};
use argnn::solver::Semantics;
use argnn::train::{
    load_checkpoint, resume_with_progress, train_with_progress, EpochLog, TrainConfig,
    TrainOutcome,
};
use argnn::{Error, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Args)]
pub struct TrainArgs {
    /// JSON config file; see the config schema in the README.
    #[arg(long)]
    pub config: PathBuf,
    /// Continue from this checkpoint under its own recorded configuration
    /// (only --max-epochs and --target-mcc still apply; datasets come from
    /// the config file).
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Override the config file's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the epoch budget.
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Override the early-exit validation MCC target.
    #[arg(long)]
    pub target_mcc: Option<f64>,
}

/// On-disk config schema. `task`, `semantics`, `train_data`, and
/// `val_data` are required; every other knob falls back to the library
/// defaults. Unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    train_data: PathBuf,
    val_data: PathBuf,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    task: Task,
    semantics: Semantics,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    steps: Option<usize>,
    #[serde(default)]
    batch_graphs: Option<usize>,
    #[serde(default)]
    lr_max: Option<f64>,
    #[serde(default)]
    lr_min: Option<f64>,
    #[serde(default)]
    cycle_epochs: Option<usize>,
    #[serde(default)]
    weight_decay: Option<f64>,
    #[serde(default)]
    clip_norm: Option<f64>,
    #[serde(default)]
    beta1: Option<f64>,
    #[serde(default)]
    beta2: Option<f64>,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(default)]
    max_epochs: Option<usize>,
    #[serde(default)]
    patience: Option<usize>,
    #[serde(default)]
    checkpoint_every: Option<usize>,
    #[serde(default)]
    target_val_mcc: Option<f64>,
}

impl FileConfig {
    fn resolve(self, args: &TrainArgs) -> (TrainConfig, PathBuf, PathBuf, Option<PathBuf>) {
        let mut cfg =
            TrainConfig::new(self.task, self.semantics, args.seed.or(self.seed).unwrap_or(0));
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        take!(
            dim,
            steps,
            batch_graphs,
            lr_max,
            lr_min,
            cycle_epochs,
            weight_decay,
            clip_norm,
            beta1,
            beta2,
            epsilon,
            max_epochs,
            patience,
            checkpoint_every,
        );
        cfg.target_val_mcc = self.target_val_mcc;
        if let Some(v) = args.max_epochs {
            cfg.max_epochs = v;
        }
        if let Some(v) = args.target_mcc {
            cfg.target_val_mcc = Some(v);
        }
        let out_dir = args.out.clone().or(self.out_dir);
        (cfg, self.train_data, self.val_data, out_dir)
    }
}

fn progress_line(log: &EpochLog) {
    eprintln!(
        "epoch {:>4}  loss {:.6}  val_mcc {:+.4}  val_mae {:.4}  lr {:.3e}{}",
        log.epoch,
        log.train_loss,
        log.val_mcc,
        log.val_mae,
        log.learning_rate,
        if log.is_best { "  *" } else { "" }
    );
}

pub fn run(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", args.config.display())))?;
    let file_config: FileConfig = serde_json::from_str(&text)
        .map_err(|e| Error::usage(format!("{}: {e}", args.config.display())))?;
    let (config, train_path, val_path, out_dir) = file_config.resolve(&args);
    let out_dir = out_dir
        .ok_or_else(|| Error::usage("training needs an output directory (out_dir or --out)"))?;

    let train_records = read_jsonl(&train_path)?;
    let val_records = read_jsonl(&val_path)?;
    std::fs::create_dir_all(&out_dir)?;
    eprintln!(
        "training {} {} on {} records ({} validation), checkpoints in {}",
        config.task,
        config.semantics,
        train_records.len(),
        val_records.len(),
        out_dir.display()
    );

    let mut show = progress_line;
    let (outcome, effective) = match &args.resume {
        None => {
            let outcome = train_with_progress(
                &config,
                &train_records,
                &val_records,
                Some(&out_dir),
                &mut show,
            )?;
            (outcome, config)
        }
        Some(path) => {
            let mut checkpoint = load_checkpoint(path)?;
            if let Some(v) = args.max_epochs {
                checkpoint.config.max_epochs = v;
            }
            if let Some(v) = args.target_mcc {
                checkpoint.config.target_val_mcc = Some(v);
            }
            let effective = checkpoint.config.clone();
            let outcome = resume_with_progress(
                checkpoint,
                &train_records,
                &val_records,
                Some(&out_dir),
                &mut show,
            )?;
            (outcome, effective)
        }
    };

    let summary = summarize(&outcome);
    println!("{}", serde_json::to_string_pretty(&summary)?);

    let mut manifest = RunManifest::new(
        "train",
        json!({
            "train_data": train_path.display().to_string(),
            "val_data": val_path.display().to_string(),
            "out_dir": out_dir.display().to_string(),
            "resume": args.resume.as_ref().map(|p| p.display().to_string()),
            "train": effective,
        }),
        Some(effective.seed),
    );
    manifest.input_file(&args.config)?;
    manifest.input_file(&train_path)?;
    manifest.input_file(&val_path)?;
    if let Some(path) = &args.resume {
        manifest.input_file(path)?;
    }
    add_checkpoint_outputs(&mut manifest, &out_dir)?;
    manifest.details = summary;
    manifest.write(&out_dir.join("manifest.json"), started)?;
    Ok(())
}

fn summarize(outcome: &TrainOutcome) -> serde_json::Value {
    json!({
        "stop": outcome.stop,
        "epochs": outcome.last.epoch,
        "best_epoch": outcome.best.best_epoch,
        "best_val_mcc": outcome.best.best_val_mcc,
        "parameters": outcome.last.params.count_parameters(),
        "final_train_loss": outcome.batch_losses.last(),
    })
}

fn add_checkpoint_outputs(manifest: &mut RunManifest, out_dir: &Path) -> Result<()> {
    for name in ["best.json", "last.json"] {
        let path = out_dir.join(name);
        if path.exists() {
            manifest.output_file(&path)?;
        }
    }
    Ok(())
}
