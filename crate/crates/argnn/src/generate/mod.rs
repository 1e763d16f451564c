//! Seeded random framework generators.
//!
//! Four families with different structural character:
//!
//! * random-attack: every ordered pair (self-attacks included) attacks
//!   independently with probability `p`;
//! * grounded-oriented: layered acyclic graphs with unattacked roots, so the
//!   grounded extension resolves every argument;
//! * scc-structured: blocks of mutually reachable arguments (directed
//!   cycles plus chords) arranged in a DAG by forward cross-block attacks;
//! * stable-oriented: random-attack instances resampled until at least one
//!   stable extension exists.
//!
//! Generation is deterministic in the seed: attempt `k` draws from an
//! independent stream of a counter-based RNG, so a corpus is reproducible
//! regardless of how many attempts families reject. Corpora are
//! deduplicated by structural signature, with an exact isomorphism check
//! breaking signature ties on small frameworks.

mod iso;

pub use iso::{canonical_signature, is_isomorphic_exact, ISO_MAX_ARGUMENTS};

use crate::af::{ArgumentationFramework, MAX_ARGUMENTS};
use crate::solver::has_stable_extension;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RandomAttack,
    GroundedOriented,
    SccStructured,
    StableOriented,
    /// Cycles through the four concrete families.
    Mixed,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RandomAttack => "random-attack",
            Family::GroundedOriented => "grounded-oriented",
            Family::SccStructured => "scc-structured",
            Family::StableOriented => "stable-oriented",
            Family::Mixed => "mixed",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random-attack" | "random" => Ok(Family::RandomAttack),
            "grounded-oriented" | "grounded" => Ok(Family::GroundedOriented),
            "scc-structured" | "scc" => Ok(Family::SccStructured),
            "stable-oriented" | "stable" => Ok(Family::StableOriented),
            "mixed" => Ok(Family::Mixed),
            other => Err(Error::usage(format!(
                "unknown family {other:?} (expected random-attack, grounded-oriented, \
                 scc-structured, stable-oriented, or mixed)"
            ))),
        }
    }
}

/// Corpus generation parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub family: Family,
    /// Inclusive argument-count range; each instance samples uniformly.
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    /// Attack probability for random-attack and stable-oriented; sampled
    /// per instance from [0.04, 0.35] when absent.
    pub attack_probability: Option<f64>,
}

impl GeneratorConfig {
    pub fn new(family: Family, n_min: usize, n_max: usize, count: usize, seed: u64) -> Self {
        GeneratorConfig { family, n_min, n_max, count, seed, attack_probability: None }
    }

    fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::usage(format!(
                "invalid argument-count range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.n_max > MAX_ARGUMENTS {
            return Err(Error::usage(format!(
                "generators are limited to {MAX_ARGUMENTS} arguments, asked for {}",
                self.n_max
            )));
        }
        if let Some(p) = self.attack_probability {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::usage(format!("attack probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// A generated corpus plus bookkeeping about the sampling run.
#[derive(Clone, Debug)]
pub struct GeneratedCorpus {
    pub afs: Vec<ArgumentationFramework>,
    /// Structural signature per framework, parallel to `afs`.
    pub signatures: Vec<String>,
    pub attempts: usize,
    pub rejected_duplicates: usize,
    pub rejected_no_stable: usize,
}

/// Draws one framework from a concrete family. `Mixed` is resolved by the
/// corpus loop and is not accepted here.
pub fn sample_af(
    family: Family,
    n: usize,
    attack_probability: Option<f64>,
    rng: &mut impl Rng,
) -> Result<ArgumentationFramework> {
    match family {
        Family::RandomAttack => {
            let p = attack_probability.unwrap_or_else(|| rng.gen_range(0.04..=0.35));
            random_attack(n, p, rng)
        }
        Family::GroundedOriented => grounded_oriented(n, rng),
        Family::SccStructured => scc_structured(n, rng),
        Family::StableOriented => {
            // One candidate per call; the corpus loop retries on rejection.
            let p = attack_probability.unwrap_or_else(|| rng.gen_range(0.04..=0.35));
            random_attack(n, p, rng)
        }
        Family::Mixed => Err(Error::usage("sample_af needs a concrete family, not mixed")),
    }
}

fn random_attack(n: usize, p: f64, rng: &mut impl Rng) -> Result<ArgumentationFramework> {
    let mut attacks = Vec::new();
    for u in 0..n {
        for w in 0..n {
            if rng.gen_bool(p) {
                attacks.push((u, w));
            }
        }
    }
    ArgumentationFramework::from_edges(n, attacks)
}

/// Random layer assignment with every layer non-empty; attacks only point
/// from lower to strictly higher layers, so layer 0 is unattacked.
fn grounded_oriented(n: usize, rng: &mut impl Rng) -> Result<ArgumentationFramework> {
    let layers = rng.gen_range(2..=4).min(n);
    let mut layer_of = vec![0usize; n];
    // First `layers` nodes pin one node per layer; the rest spread uniformly.
    for (i, slot) in layer_of.iter_mut().enumerate().take(layers) {
        *slot = i;
    }
    for slot in layer_of.iter_mut().skip(layers) {
        *slot = rng.gen_range(0..layers);
    }
    let p = rng.gen_range(0.15..=0.45);
    let mut attacks = Vec::new();
    for u in 0..n {
        for w in 0..n {
            if layer_of[u] < layer_of[w] && rng.gen_bool(p) {
                attacks.push((u, w));
            }
        }
    }
    ArgumentationFramework::from_edges(n, attacks)
}

/// Contiguous blocks, each a directed cycle plus random chords; cross-block
/// attacks only point forward, so blocks form a DAG of strongly connected
/// components.
fn scc_structured(n: usize, rng: &mut impl Rng) -> Result<ArgumentationFramework> {
    let blocks = rng.gen_range(2..=4).min(n);
    // Random block sizes >= 1 summing to n: distribute the surplus.
    let mut sizes = vec![1usize; blocks];
    for _ in 0..n - blocks {
        let b = rng.gen_range(0..blocks);
        sizes[b] += 1;
    }
    let mut start = Vec::with_capacity(blocks);
    let mut acc = 0;
    for &s in &sizes {
        start.push(acc);
        acc += s;
    }
    let chord_p = rng.gen_range(0.1..=0.3);
    let cross_p = rng.gen_range(0.08..=0.2);
    let mut attacks = Vec::new();
    for b in 0..blocks {
        let lo = start[b];
        let hi = lo + sizes[b];
        if sizes[b] >= 2 {
            for u in lo..hi {
                let next = if u + 1 == hi { lo } else { u + 1 };
                attacks.push((u, next));
            }
            for u in lo..hi {
                for w in lo..hi {
                    if u != w && rng.gen_bool(chord_p) {
                        attacks.push((u, w));
                    }
                }
            }
        }
        for other in b + 1..blocks {
            for u in lo..hi {
                for w in start[other]..start[other] + sizes[other] {
                    if rng.gen_bool(cross_p) {
                        attacks.push((u, w));
                    }
                }
            }
        }
    }
    ArgumentationFramework::from_edges(n, attacks)
}

const STABLE_RETRIES_PER_ATTEMPT: usize = 64;

/// Generates a deduplicated corpus per `config`.
///
/// Errors with a resource limit when the attempt budget is exhausted before
/// `count` distinct frameworks are found (tiny ranges have few isomorphism
/// classes).
pub fn generate_corpus(config: &GeneratorConfig) -> Result<GeneratedCorpus> {
    generate_corpus_excluding(config, &std::collections::HashSet::new())
}

/// [`generate_corpus`] that additionally rejects any framework whose
/// signature appears in `exclude`, for building disjoint splits.
pub fn generate_corpus_excluding(
    config: &GeneratorConfig,
    exclude: &std::collections::HashSet<String>,
) -> Result<GeneratedCorpus> {
    config.validate()?;
    let mut afs: Vec<ArgumentationFramework> = Vec::with_capacity(config.count);
    let mut signatures: Vec<String> = Vec::with_capacity(config.count);
    let mut buckets: HashMap<String, Vec<usize>> = HashMap::new();
    let mut attempts = 0usize;
    let mut rejected_duplicates = 0usize;
    let mut rejected_no_stable = 0usize;
    let max_attempts = config.count.saturating_mul(64).saturating_add(256);

    while afs.len() < config.count {
        if attempts >= max_attempts {
            return Err(Error::resource(format!(
                "generated only {} of {} distinct frameworks in {} attempts",
                afs.len(),
                config.count,
                attempts
            )));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(attempts as u64 + 1);
        attempts += 1;

        let family = match config.family {
            Family::Mixed => match attempts % 4 {
                1 => Family::RandomAttack,
                2 => Family::GroundedOriented,
                3 => Family::SccStructured,
                _ => Family::StableOriented,
            },
            concrete => concrete,
        };
        let n = rng.gen_range(config.n_min..=config.n_max);
        let af = if family == Family::StableOriented {
            let mut found = None;
            for _ in 0..STABLE_RETRIES_PER_ATTEMPT {
                let candidate = sample_af(family, n, config.attack_probability, &mut rng)?;
                if has_stable_extension(&candidate) {
                    found = Some(candidate);
                    break;
                }
                rejected_no_stable += 1;
            }
            match found {
                Some(af) => af,
                None => continue,
            }
        } else {
            sample_af(family, n, config.attack_probability, &mut rng)?
        };

        let sig = canonical_signature(&af);
        if exclude.contains(&sig) {
            rejected_duplicates += 1;
            continue;
        }
        let bucket = buckets.entry(sig.clone()).or_default();
        let duplicate = if af.n() <= ISO_MAX_ARGUMENTS {
            bucket.iter().any(|&i| {
                afs[i].n() <= ISO_MAX_ARGUMENTS
                    && is_isomorphic_exact(&afs[i], &af).unwrap_or(true)
            })
        } else {
            // Beyond the exact-check bound a signature match counts as a
            // duplicate; collisions only cost corpus variety, never labels.
            !bucket.is_empty()
        };
        if duplicate {
            rejected_duplicates += 1;
            continue;
        }
        bucket.push(afs.len());
        afs.push(af);
        signatures.push(sig);
    }

    Ok(GeneratedCorpus { afs, signatures, attempts, rejected_duplicates, rejected_no_stable })
}
