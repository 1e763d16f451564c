//! Run manifests: every artifact-producing invocation records what ran,
//! with which resolved configuration and seed, over which inputs, and the
//! digest of everything it wrote.
//!
//! Two runs whose manifests agree on every field except `wall_seconds`
//! produced byte-identical artifacts; the output digests make that
//! checkable after the fact. Runs that only print to stdout keep no
//! artifacts and write no manifest.

use argnn::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ArtifactRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub v: u32,
    pub subcommand: &'static str,
    /// Full resolved configuration after flag overrides.
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<ArtifactRef>,
    pub outputs: Vec<ArtifactRef>,
    /// Subcommand-specific summary (counts, stats, stop reasons).
    pub details: serde_json::Value,
    /// Timing only; excluded from determinism comparisons.
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            v: MANIFEST_SCHEMA_VERSION,
            subcommand,
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: serde_json::Value::Null,
            wall_seconds: 0.0,
        }
    }

    pub fn input_file(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(file_ref(path)?);
        Ok(())
    }

    /// One combined entry for a directory of inputs; see [`dir_digest`].
    pub fn input_dir(&mut self, path: &Path, extension: &str) -> Result<()> {
        self.inputs.push(ArtifactRef {
            path: path.display().to_string(),
            sha256: dir_digest(path, extension)?,
        });
        Ok(())
    }

    pub fn output_file(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(file_ref(path)?);
        Ok(())
    }

    pub fn write(mut self, path: &Path, started: Instant) -> Result<()> {
        self.wall_seconds = started.elapsed().as_secs_f64();
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Manifest location for a file artifact: `report.json` gets
/// `report.json.manifest.json` beside it.
pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

fn file_ref(path: &Path) -> Result<ArtifactRef> {
    Ok(ArtifactRef { path: path.display().to_string(), sha256: sha256_file(path)? })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex(&hasher.finalize()))
}

/// Order-independent digest of every `*.extension` file in `dir`: file
/// names sorted, then sha256 over (name, content digest) pairs.
pub fn dir_digest(dir: &Path, extension: &str) -> Result<String> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::usage(format!("cannot read directory {}: {e}", dir.display())))?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == extension))
        .collect();
    paths.sort();
    let mut hasher = Sha256::new();
    for path in paths {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        hasher.update(name.as_bytes());
        hasher.update([0u8]);
        hasher.update(sha256_file(&path)?.as_bytes());
        hasher.update([0u8]);
    }
    Ok(hex(&hasher.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}
