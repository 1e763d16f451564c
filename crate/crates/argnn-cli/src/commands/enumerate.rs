use crate::manifest::{manifest_path, RunManifest};
use argnn::dataset::read_apx_dir;
use argnn::search::{
    enumerate_by_search, EnumerationAggregate, ExactSource, LabelSource, ModelSource,
    SearchOptions,
};
use argnn::solver::{enumerate_extensions, Semantics};
use argnn::train::load_checkpoint;
use argnn::{Error, Result};
use clap::Args;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct EnumerateArgs {
    /// Semantics: grd, com, prf, or stb.
    #[arg(long)]
    pub semantics: Semantics,
    /// Label source: exact or model.
    #[arg(long)]
    pub source: String,
    /// Checkpoint for the model source.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Inference steps for the model source; the checkpoint's trained
    /// count when omitted.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Directory of APX files.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report file (JSON).
    #[arg(long)]
    pub report: PathBuf,
    /// Node budget per framework.
    #[arg(long, default_value_t = SearchOptions::default().node_budget)]
    pub budget: usize,
    /// Disable the completeness verification pass (complete semantics
    /// only); leaves alone are recorded and recall may drop.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Serialize)]
struct PerFramework {
    name: String,
    found: Vec<Vec<String>>,
    truth: Vec<Vec<String>>,
    precision: f64,
    recall: f64,
    expanded: usize,
    source_calls: usize,
    pruned_subtrees: usize,
    incomplete: bool,
}

#[derive(Serialize)]
struct Report {
    v: u32,
    semantics: Semantics,
    source: String,
    steps: Option<usize>,
    verify_complete: bool,
    node_budget: usize,
    frameworks: usize,
    mean_precision: f64,
    mean_recall: f64,
    pooled_precision: f64,
    pooled_recall: f64,
    expanded_total: usize,
    incomplete_frameworks: usize,
    per_framework: Vec<PerFramework>,
}

pub fn run(args: EnumerateArgs) -> Result<()> {
    let started = Instant::now();
    let named = read_apx_dir(&args.input)?;
    if named.is_empty() {
        return Err(Error::usage(format!("no .apx files in {}", args.input.display())));
    }

    let checkpoint = match args.source.as_str() {
        "exact" => None,
        "model" => {
            let path = args
                .checkpoint
                .as_ref()
                .ok_or_else(|| Error::usage("the model source needs --checkpoint"))?;
            Some(load_checkpoint(path)?)
        }
        other => return Err(Error::usage(format!("unknown source {other:?}"))),
    };
    let steps = checkpoint.as_ref().map(|c| args.steps.unwrap_or(c.config.steps));
    let source: Box<dyn LabelSource + '_> = match &checkpoint {
        None => Box::new(ExactSource::new(args.semantics)),
        Some(c) => Box::new(ModelSource::new(&c.params, steps.expect("set with checkpoint"))),
    };
    let options =
        SearchOptions { verify_complete: !args.no_verify, node_budget: args.budget };

    let mut aggregate = EnumerationAggregate::default();
    let mut per_framework = Vec::with_capacity(named.len());
    let mut expanded_total = 0usize;
    let mut incomplete_frameworks = 0usize;
    for (name, af) in &named {
        let truth = enumerate_extensions(af, args.semantics)?;
        let result = enumerate_by_search(af, args.semantics, source.as_ref(), &options)?;
        let metrics = aggregate.add(&result.extensions, &truth);
        expanded_total += result.stats.expanded;
        incomplete_frameworks += usize::from(result.incomplete);
        let names_of = |sets: &[argnn::af::ArgumentSet]| -> Vec<Vec<String>> {
            sets.iter()
                .map(|&s| af.set_names(s).into_iter().map(str::to_owned).collect())
                .collect()
        };
        per_framework.push(PerFramework {
            name: name.clone(),
            found: names_of(&result.extensions),
            truth: names_of(&truth),
            precision: metrics.precision,
            recall: metrics.recall,
            expanded: result.stats.expanded,
            source_calls: result.stats.source_calls,
            pruned_subtrees: result.stats.pruned_subtrees,
            incomplete: result.incomplete,
        });
    }

    let report = Report {
        v: 1,
        semantics: args.semantics,
        source: args.source.clone(),
        steps,
        verify_complete: options.verify_complete,
        node_budget: options.node_budget,
        frameworks: named.len(),
        mean_precision: aggregate.mean_precision(),
        mean_recall: aggregate.mean_recall(),
        pooled_precision: aggregate.pooled_precision(),
        pooled_recall: aggregate.pooled_recall(),
        expanded_total,
        incomplete_frameworks,
        per_framework,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&args.report, &text)?;
    eprintln!(
        "{} frameworks: mean precision {:.4}, mean recall {:.4} ({} nodes expanded)",
        report.frameworks, report.mean_precision, report.mean_recall, expanded_total
    );

    let mut manifest = RunManifest::new(
        "enumerate",
        json!({
            "semantics": args.semantics,
            "source": args.source,
            "checkpoint": args.checkpoint.as_ref().map(|p| p.display().to_string()),
            "steps": steps,
            "in": args.input.display().to_string(),
            "verify_complete": options.verify_complete,
            "node_budget": options.node_budget,
        }),
        None,
    );
    manifest.input_dir(&args.input, "apx")?;
    if let Some(path) = &args.checkpoint {
        manifest.input_file(path)?;
    }
    manifest.output_file(&args.report)?;
    manifest.details = json!({
        "mean_precision": report.mean_precision,
        "mean_recall": report.mean_recall,
        "pooled_precision": report.pooled_precision,
        "pooled_recall": report.pooled_recall,
    });
    manifest.write(&manifest_path(&args.report), started)?;
    Ok(())
}
