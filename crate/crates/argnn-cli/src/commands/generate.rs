use crate::manifest::RunManifest;
use argnn::af::to_apx;
use argnn::generate::{generate_corpus, Family, GeneratorConfig};
use argnn::Result;
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct GenerateArgs {
    /// Family: random-attack, grounded-oriented, scc-structured,
    /// stable-oriented, or mixed.
    #[arg(long)]
    pub family: Family,
    /// Inclusive argument-count range, LO..HI (or a single N).
    #[arg(long)]
    pub n: String,
    /// Distinct frameworks to produce.
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output directory; one APX file per framework plus manifest.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Attack probability where the family uses one; per-instance sample
    /// when absent.
    #[arg(long)]
    pub attack_probability: Option<f64>,
}

pub fn run(args: GenerateArgs) -> Result<()> {
    let started = Instant::now();
    let (n_min, n_max) = super::parse_range(&args.n)?;
    let config = GeneratorConfig {
        family: args.family,
        n_min,
        n_max,
        count: args.count,
        seed: args.seed,
        attack_probability: args.attack_probability,
    };
    let corpus = generate_corpus(&config)?;

    std::fs::create_dir_all(&args.out)?;
    let width = args.count.saturating_sub(1).to_string().len().max(3);
    let mut manifest =
        RunManifest::new("generate", serde_json::to_value(&config)?, Some(args.seed));
    let mut files = Vec::with_capacity(corpus.afs.len());
    for (i, af) in corpus.afs.iter().enumerate() {
        let name = format!("af_{i:0width$}");
        let path = args.out.join(format!("{name}.apx"));
        std::fs::write(&path, to_apx(af))?;
        manifest.output_file(&path)?;
        files.push(json!({ "file": format!("{name}.apx"), "signature": corpus.signatures[i] }));
    }
    manifest.details = json!({
        "frameworks": corpus.afs.len(),
        "attempts": corpus.attempts,
        "rejected_duplicates": corpus.rejected_duplicates,
        "rejected_no_stable": corpus.rejected_no_stable,
        "files": files,
    });
    manifest.write(&args.out.join("manifest.json"), started)?;
    eprintln!(
        "wrote {} frameworks to {} ({} attempts)",
        corpus.afs.len(),
        args.out.display(),
        corpus.attempts
    );
    Ok(())
}
