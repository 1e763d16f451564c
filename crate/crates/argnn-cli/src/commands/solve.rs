use crate::manifest::{manifest_path, RunManifest};
use argnn::dataset::Task;
use argnn::solver::{
    constructive_acceptance, credulous_acceptance, enumerate_extensions, sceptical_acceptance,
    Semantics,
};
use argnn::{Error, Result};
use clap::Args;
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct SolveArgs {
    /// Semantics: grd, com, prf, or stb.
    #[arg(long)]
    pub semantics: Semantics,
    /// Acceptance task: credulous, sceptical, or constructive.
    /// Mutually exclusive with --enumerate.
    #[arg(long, conflicts_with = "enumerate")]
    pub task: Option<Task>,
    /// Enumerate the full extension family instead.
    #[arg(long)]
    pub enumerate: bool,
    /// Given set for the constructive task, comma-separated names;
    /// empty set when omitted.
    #[arg(long)]
    pub given: Option<String>,
    /// Enumeration output: json (`[["a","c"]]`) or text (one `[a,c]` line
    /// per extension).
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Write the result here (and a manifest beside it) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Framework in APX format.
    pub file: PathBuf,
}

pub fn run(args: SolveArgs) -> Result<()> {
    let started = Instant::now();
    let af = super::read_apx_file(&args.file)?;

    let output = if args.enumerate {
        let extensions = enumerate_extensions(&af, args.semantics)?;
        match args.format.as_str() {
            "json" => {
                let families: Vec<Vec<&str>> =
                    extensions.iter().map(|&e| af.set_names(e)).collect();
                let mut s = serde_json::to_string(&families)?;
                s.push('\n');
                s
            }
            "text" => {
                let mut s = String::new();
                for &e in &extensions {
                    let _ = writeln!(s, "[{}]", af.set_names(e).join(","));
                }
                s
            }
            other => return Err(Error::usage(format!("unknown format {other:?}"))),
        }
    } else {
        let task = args
            .task
            .ok_or_else(|| Error::usage("pass exactly one of --task or --enumerate"))?;
        match task {
            Task::Credulous | Task::Sceptical => {
                let labels = match task {
                    Task::Credulous => credulous_acceptance(&af, args.semantics)?,
                    _ => sceptical_acceptance(&af, args.semantics)?,
                };
                let mut s = acceptance_map(&af, &labels)?;
                s.push('\n');
                s
            }
            Task::Constructive => {
                let given = match &args.given {
                    Some(spec) => af.set_from_names(spec)?,
                    None => argnn::af::ArgumentSet::empty(),
                };
                let result = constructive_acceptance(&af, args.semantics, given)?;
                format!(
                    "{{\"legal\":{},\"accepted\":{}}}\n",
                    result.legal,
                    acceptance_map(&af, &result.labels)?
                )
            }
        }
    };

    match &args.out {
        None => print!("{output}"),
        Some(path) => {
            std::fs::write(path, &output)?;
            let mut manifest = RunManifest::new(
                "solve",
                json!({
                    "semantics": args.semantics,
                    "task": args.task,
                    "enumerate": args.enumerate,
                    "given": args.given,
                    "format": args.format,
                }),
                None,
            );
            manifest.input_file(&args.file)?;
            manifest.output_file(path)?;
            manifest.details = json!({ "arguments": af.n(), "attacks": af.attacks().len() });
            manifest.write(&manifest_path(path), started)?;
        }
    }
    Ok(())
}

/// JSON object mapping argument names to 0/1 in argument index order.
fn acceptance_map(af: &argnn::af::ArgumentationFramework, labels: &[u8]) -> Result<String> {
    let mut s = String::from("{");
    for (i, name) in af.names().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}:{}", serde_json::to_string(name)?, labels[i]);
    }
    s.push('}');
    Ok(s)
}
