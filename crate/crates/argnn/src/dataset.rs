//! Acceptance datasets: per-argument labels computed by the exact solver,
//! serialized one JSON record per line.
//!
//! Schema (version 1): `v`, `names`, `attacks`, `task`, `semantics`,
//! `labels`, plus `given` and `legal` for the constructive task and an
//! optional structural `sig`. Reading validates every invariant and reports
//! 1-based line numbers on failure.

use crate::af::{ArgumentSet, ArgumentationFramework};
use crate::generate::canonical_signature;
use crate::solver::{
    constructive_acceptance, credulous_acceptance, enumerate_extensions, grounded_extension,
    sceptical_acceptance, Semantics,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

/// Which acceptance map the labels encode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Credulous,
    Sceptical,
    Constructive,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Credulous => "credulous",
            Task::Sceptical => "sceptical",
            Task::Constructive => "constructive",
        })
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "credulous" | "cred" => Ok(Task::Credulous),
            "sceptical" | "scept" | "skeptical" => Ok(Task::Sceptical),
            "constructive" | "constr" => Ok(Task::Constructive),
            other => Err(Error::usage(format!(
                "unknown task {other:?} (expected credulous, sceptical, or constructive)"
            ))),
        }
    }
}

/// One labelled framework.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub v: u32,
    pub names: Vec<String>,
    pub attacks: Vec<(usize, usize)>,
    pub task: Task,
    pub semantics: Semantics,
    /// Ascending indices of the given set; constructive records only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub given: Option<Vec<usize>>,
    /// Per-argument 0/1 acceptance labels, one per argument.
    pub labels: Vec<u8>,
    /// Whether the given set extends to at least one extension;
    /// constructive records only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub legal: Option<bool>,
    /// Structural signature of the framework, for split bookkeeping.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sig: Option<String>,
}

impl DatasetRecord {
    pub fn to_af(&self) -> Result<ArgumentationFramework> {
        ArgumentationFramework::new(self.names.clone(), self.attacks.clone())
    }

    pub fn given_set(&self) -> Result<Option<ArgumentSet>> {
        match &self.given {
            None => Ok(None),
            Some(idx) => {
                Ok(Some(ArgumentSet::from_indices(idx.iter().copied(), self.names.len())?))
            }
        }
    }

    /// Structural well-formedness; label truth is [`verify_record`].
    pub fn validate(&self) -> Result<()> {
        if self.v != DATASET_SCHEMA_VERSION {
            return Err(Error::usage(format!(
                "unsupported dataset schema version {} (expected {DATASET_SCHEMA_VERSION})",
                self.v
            )));
        }
        let af = self.to_af()?;
        let n = af.n();
        if n == 0 {
            return Err(Error::usage("record has no arguments"));
        }
        if self.labels.len() != n {
            return Err(Error::usage(format!(
                "labels length {} does not match {} arguments",
                self.labels.len(),
                n
            )));
        }
        if self.labels.iter().any(|&l| l > 1) {
            return Err(Error::usage("labels must be 0 or 1"));
        }
        match self.task {
            Task::Constructive => {
                let Some(given) = &self.given else {
                    return Err(Error::usage("constructive record is missing the given set"));
                };
                let Some(legal) = self.legal else {
                    return Err(Error::usage("constructive record is missing the legal flag"));
                };
                if given.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::usage("given set must be strictly ascending"));
                }
                if given.iter().any(|&i| i >= n) {
                    return Err(Error::usage("given set index out of range"));
                }
                if legal {
                    if given.iter().any(|&i| self.labels[i] != 1) {
                        return Err(Error::usage(
                            "legal constructive record must label the given set 1",
                        ));
                    }
                } else if self.labels.iter().any(|&l| l != 0) {
                    return Err(Error::usage(
                        "illegal constructive record must have all-zero labels",
                    ));
                }
            }
            Task::Credulous | Task::Sceptical => {
                if self.given.is_some() || self.legal.is_some() {
                    return Err(Error::usage(
                        "given/legal fields only belong to constructive records",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Recomputes the labels with the exact solver and compares.
pub fn verify_record(record: &DatasetRecord) -> Result<bool> {
    record.validate()?;
    let af = record.to_af()?;
    match record.task {
        Task::Credulous => Ok(credulous_acceptance(&af, record.semantics)? == record.labels),
        Task::Sceptical => Ok(sceptical_acceptance(&af, record.semantics)? == record.labels),
        Task::Constructive => {
            let given = record.given_set()?.expect("validated constructive record");
            let result = constructive_acceptance(&af, record.semantics, given)?;
            Ok(result.labels == record.labels && Some(result.legal) == record.legal)
        }
    }
}

/// Builds a credulous or sceptical record.
pub fn build_acceptance_record(
    af: &ArgumentationFramework,
    task: Task,
    semantics: Semantics,
) -> Result<DatasetRecord> {
    let labels = match task {
        Task::Credulous => credulous_acceptance(af, semantics)?,
        Task::Sceptical => sceptical_acceptance(af, semantics)?,
        Task::Constructive => {
            return Err(Error::usage(
                "constructive records are sampled; use build_constructive_records",
            ))
        }
    };
    Ok(DatasetRecord {
        v: DATASET_SCHEMA_VERSION,
        names: af.names().to_vec(),
        attacks: af.attacks().to_vec(),
        task,
        semantics,
        given: None,
        labels,
        legal: None,
        sig: Some(canonical_signature(af)),
    })
}

/// A legal/illegal pair of constructive records for one framework.
pub struct ConstructiveSample {
    pub legal: DatasetRecord,
    /// Absent when no illegal set was found within the attempt budget
    /// (for instance when every subset of the single extension is legal).
    pub illegal: Option<DatasetRecord>,
}

const ILLEGAL_SAMPLING_ATTEMPTS: usize = 64;

/// Samples constructive records for `af`.
///
/// The legal record draws one extension uniformly and keeps each member
/// with probability one half. The illegal record draws uniform argument
/// subsets until one extends no extension. Returns `None` when the
/// extension family is empty (only possible for stable), since no legal
/// given set exists.
pub fn build_constructive_records(
    af: &ArgumentationFramework,
    semantics: Semantics,
    rng: &mut impl Rng,
) -> Result<Option<ConstructiveSample>> {
    let n = af.n();
    let exts: Vec<ArgumentSet> = if semantics == Semantics::Grounded {
        vec![grounded_extension(af)?]
    } else {
        enumerate_extensions(af, semantics)?
    };
    if exts.is_empty() {
        return Ok(None);
    }

    let base = exts[rng.gen_range(0..exts.len())];
    let mut given = ArgumentSet::empty();
    for i in base.iter() {
        if rng.gen_bool(0.5) {
            given.insert(i);
        }
    }
    let legal_result = constructive_acceptance(af, semantics, given)?;
    debug_assert!(legal_result.legal);
    let make = |given: ArgumentSet, labels: Vec<u8>, legal: bool| DatasetRecord {
        v: DATASET_SCHEMA_VERSION,
        names: af.names().to_vec(),
        attacks: af.attacks().to_vec(),
        task: Task::Constructive,
        semantics,
        given: Some(given.to_vec()),
        labels,
        legal: Some(legal),
        sig: Some(canonical_signature(af)),
    };
    let legal = make(given, legal_result.labels, true);

    let mut illegal = None;
    for _ in 0..ILLEGAL_SAMPLING_ATTEMPTS {
        let mut candidate = ArgumentSet::empty();
        for i in 0..n {
            if rng.gen_bool(0.5) {
                candidate.insert(i);
            }
        }
        if !exts.iter().any(|e| candidate.is_subset(*e)) {
            let result = constructive_acceptance(af, semantics, candidate)?;
            debug_assert!(!result.legal);
            illegal = Some(make(candidate, result.labels, false));
            break;
        }
    }
    Ok(Some(ConstructiveSample { legal, illegal }))
}

/// Dataset-build bookkeeping.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct DatasetStats {
    pub records: usize,
    pub frameworks: usize,
    /// Frameworks skipped because the extension family was empty.
    pub skipped_empty_family: usize,
    /// Constructive frameworks where no illegal set was found.
    pub missing_illegal: usize,
}

/// Labels a corpus. Constructive datasets get up to two records per
/// framework (one legal, one illegal); the other tasks get one.
pub fn build_dataset(
    afs: &[ArgumentationFramework],
    task: Task,
    semantics: Semantics,
    seed: u64,
) -> Result<(Vec<DatasetRecord>, DatasetStats)> {
    let mut records = Vec::new();
    let mut stats = DatasetStats { frameworks: afs.len(), ..DatasetStats::default() };
    for (i, af) in afs.iter().enumerate() {
        match task {
            Task::Credulous | Task::Sceptical => {
                records.push(build_acceptance_record(af, task, semantics)?);
            }
            Task::Constructive => {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                match build_constructive_records(af, semantics, &mut rng)? {
                    None => stats.skipped_empty_family += 1,
                    Some(sample) => {
                        records.push(sample.legal);
                        match sample.illegal {
                            Some(rec) => records.push(rec),
                            None => stats.missing_illegal += 1,
                        }
                    }
                }
            }
        }
    }
    stats.records = records.len();
    Ok((records, stats))
}

/// Writes records as JSON lines.
pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads and validates JSON-line records; errors carry line numbers.
pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        record.validate().map_err(|e| Error::parse(lineno, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

/// Reads every `.apx` file in a directory, sorted by file name.
pub fn read_apx_dir(dir: &Path) -> Result<Vec<(String, ArgumentationFramework)>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "apx"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let af = crate::af::parse_apx(&text).map_err(|e| match e {
            Error::Parse { line, message } => {
                Error::parse(line, format!("{}: {message}", path.display()))
            }
            other => other,
        })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.push((name, af));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_corpus, Family, GeneratorConfig};

    fn running_example() -> ArgumentationFramework {
        ArgumentationFramework::from_named(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("b", "d"), ("c", "d"), ("d", "c")],
        )
        .unwrap()
    }

    #[test]
    fn acceptance_records_match_solver() {
        let af = running_example();
        let rec = build_acceptance_record(&af, Task::Credulous, Semantics::Preferred).unwrap();
        assert_eq!(rec.labels, vec![1, 0, 1, 1]);
        assert!(verify_record(&rec).unwrap());
        let rec = build_acceptance_record(&af, Task::Sceptical, Semantics::Preferred).unwrap();
        assert_eq!(rec.labels, vec![1, 0, 0, 0]);
        assert!(verify_record(&rec).unwrap());
    }

    #[test]
    fn constructive_records_validate_and_verify() {
        let af = running_example();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let sample = build_constructive_records(&af, Semantics::Preferred, &mut rng)
            .unwrap()
            .expect("preferred extensions always exist");
        assert!(verify_record(&sample.legal).unwrap());
        assert_eq!(sample.legal.legal, Some(true));
        let illegal = sample.illegal.expect("this framework has illegal sets");
        assert!(verify_record(&illegal).unwrap());
        assert_eq!(illegal.labels, vec![0; 4]);
    }

    #[test]
    fn stable_empty_family_skips_framework() {
        // Odd cycle: no stable extension, so no legal given set exists.
        let af = ArgumentationFramework::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(build_constructive_records(&af, Semantics::Stable, &mut rng).unwrap().is_none());
        let (records, stats) =
            build_dataset(&[af], Task::Constructive, Semantics::Stable, 0).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.skipped_empty_family, 1);
    }

    #[test]
    fn jsonl_round_trip() {
        let corpus = generate_corpus(&GeneratorConfig::new(Family::Mixed, 3, 6, 12, 5)).unwrap();
        let (records, _) =
            build_dataset(&corpus.afs, Task::Credulous, Semantics::Grounded, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.jsonl");
        write_jsonl(&path, &records).unwrap();
        let back = read_jsonl(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn read_rejects_invalid_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        // Labels too short for the framework.
        std::fs::write(
            &path,
            "{\"v\":1,\"names\":[\"a\",\"b\"],\"attacks\":[[0,1]],\"task\":\"credulous\",\
             \"semantics\":\"grd\",\"labels\":[1]}\n",
        )
        .unwrap();
        match read_jsonl(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        // Wrong schema version.
        std::fs::write(
            &path,
            "{\"v\":2,\"names\":[\"a\"],\"attacks\":[],\"task\":\"credulous\",\
             \"semantics\":\"grd\",\"labels\":[1]}\n",
        )
        .unwrap();
        assert!(read_jsonl(&path).is_err());
        // Illegal constructive record with nonzero labels.
        std::fs::write(
            &path,
            "{\"v\":1,\"names\":[\"a\"],\"attacks\":[],\"task\":\"constructive\",\
             \"semantics\":\"grd\",\"given\":[0],\"labels\":[1],\"legal\":false}\n",
        )
        .unwrap();
        assert!(read_jsonl(&path).is_err());
    }

    #[test]
    fn dataset_builder_is_deterministic() {
        let corpus = generate_corpus(&GeneratorConfig::new(Family::Mixed, 3, 6, 10, 2)).unwrap();
        let (a, _) = build_dataset(&corpus.afs, Task::Constructive, Semantics::Preferred, 3).unwrap();
        let (b, _) = build_dataset(&corpus.afs, Task::Constructive, Semantics::Preferred, 3).unwrap();
        assert_eq!(a, b);
        let (c, _) = build_dataset(&corpus.afs, Task::Constructive, Semantics::Preferred, 4).unwrap();
        assert_ne!(a, c);
    }
}
