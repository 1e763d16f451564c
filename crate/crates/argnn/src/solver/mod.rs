//! Exact acceptance under Dung semantics.
//!
//! `S` is conflict-free when no member attacks a member. `S` defends `a`
//! when every attacker of `a` is attacked by some member of `S`. On top of
//! these, the supported semantics are:
//!
//! * complete: conflict-free, and `S` contains exactly the arguments it
//!   defends;
//! * grounded: the least complete extension (always unique);
//! * preferred: subset-maximal complete extensions;
//! * stable: conflict-free and attacking every argument outside `S`.
//!
//! The production enumerator works on in/out/undecided labellings with
//! constraint propagation; [`brute`] re-derives everything by filtering the
//! powerset and exists as an independent test oracle.

pub mod brute;
mod enumerate;

pub(crate) use enumerate::has_stable_extension;

use crate::af::{ArgumentSet, ArgumentationFramework, MAX_ARGUMENTS};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four supported semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Semantics {
    #[serde(rename = "grd")]
    Grounded,
    #[serde(rename = "com")]
    Complete,
    #[serde(rename = "prf")]
    Preferred,
    #[serde(rename = "stb")]
    Stable,
}

impl Semantics {
    pub const ALL: [Semantics; 4] =
        [Semantics::Grounded, Semantics::Complete, Semantics::Preferred, Semantics::Stable];

    pub fn short(self) -> &'static str {
        match self {
            Semantics::Grounded => "grd",
            Semantics::Complete => "com",
            Semantics::Preferred => "prf",
            Semantics::Stable => "stb",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Semantics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grd" | "grounded" => Ok(Semantics::Grounded),
            "com" | "complete" => Ok(Semantics::Complete),
            "prf" | "preferred" => Ok(Semantics::Preferred),
            "stb" | "stable" => Ok(Semantics::Stable),
            other => Err(Error::usage(format!(
                "unknown semantics {other:?} (expected grd, com, prf, or stb)"
            ))),
        }
    }
}

/// Argument status in a labelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriLabel {
    #[serde(rename = "in")]
    In,
    #[serde(rename = "out")]
    Out,
    #[serde(rename = "undec")]
    Undecided,
}

/// Default argument bound for exponential-time enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 64;

/// Enumerates all extensions of `af` under `semantics`, in canonical order
/// (lexicographic over ascending member indices).
///
/// Errors with a resource limit if `af` has more than
/// [`DEFAULT_ENUMERATION_BOUND`] arguments; use
/// [`enumerate_extensions_bounded`] to pick a different bound.
pub fn enumerate_extensions(
    af: &ArgumentationFramework,
    semantics: Semantics,
) -> Result<Vec<ArgumentSet>> {
    enumerate_extensions_bounded(af, semantics, DEFAULT_ENUMERATION_BOUND)
}

/// [`enumerate_extensions`] with an explicit argument bound (at most 64).
pub fn enumerate_extensions_bounded(
    af: &ArgumentationFramework,
    semantics: Semantics,
    max_arguments: usize,
) -> Result<Vec<ArgumentSet>> {
    let bound = max_arguments.min(MAX_ARGUMENTS);
    if af.n() > bound {
        return Err(Error::resource(format!(
            "enumeration bound is {bound} arguments, framework has {}",
            af.n()
        )));
    }
    let complete = enumerate::complete_extensions(af);
    let mut out = match semantics {
        Semantics::Complete => complete,
        Semantics::Preferred => maximal_sets(complete),
        Semantics::Stable => complete.into_iter().filter(|&s| is_stable(af, s)).collect(),
        Semantics::Grounded => {
            let minimal = minimal_sets(complete);
            debug_assert_eq!(minimal.len(), 1, "the grounded extension is unique");
            minimal
        }
    };
    out.sort();
    Ok(out)
}

fn maximal_sets(sets: Vec<ArgumentSet>) -> Vec<ArgumentSet> {
    sets.iter()
        .copied()
        .filter(|s| !sets.iter().any(|t| *s != *t && s.is_subset(*t)))
        .collect()
}

fn minimal_sets(sets: Vec<ArgumentSet>) -> Vec<ArgumentSet> {
    sets.iter()
        .copied()
        .filter(|s| !sets.iter().any(|t| *s != *t && t.is_subset(*s)))
        .collect()
}

/// Computes the grounded labelling by forward propagation.
///
/// Starts from unattacked arguments (labelled in), labels their targets out,
/// and repeats; everything never forced is undecided. Polynomial time, no
/// argument-count bound.
pub fn grounded_labelling(af: &ArgumentationFramework) -> Vec<TriLabel> {
    #[derive(Clone, Copy, PartialEq)]
    enum Raw {
        Unknown,
        In,
        Out,
    }
    let n = af.n();
    let mut labels = vec![Raw::Unknown; n];
    // Attackers not yet labelled out; an argument is forced in at zero.
    let mut non_out_attackers: Vec<usize> = (0..n).map(|i| af.attacker_indices(i).len()).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&i| non_out_attackers[i] == 0).collect();
    let mut head = 0;
    while head < queue.len() {
        let a = queue[head];
        head += 1;
        if labels[a] != Raw::Unknown {
            continue;
        }
        labels[a] = Raw::In;
        for &t in af.target_indices(a) {
            if labels[t] == Raw::Unknown {
                labels[t] = Raw::Out;
                for &tt in af.target_indices(t) {
                    non_out_attackers[tt] -= 1;
                    if non_out_attackers[tt] == 0 {
                        queue.push(tt);
                    }
                }
            }
        }
    }
    labels
        .into_iter()
        .map(|l| match l {
            Raw::In => TriLabel::In,
            Raw::Out => TriLabel::Out,
            Raw::Unknown => TriLabel::Undecided,
        })
        .collect()
}

/// The grounded extension, via the grounded labelling.
pub fn grounded_extension(af: &ArgumentationFramework) -> Result<ArgumentSet> {
    let labels = grounded_labelling(af);
    ArgumentSet::from_indices(
        labels.iter().enumerate().filter(|(_, l)| **l == TriLabel::In).map(|(i, _)| i),
        af.n(),
    )
}

/// True when `s` is a complete extension: conflict-free and fixed under the
/// characteristic function. Polynomial time.
pub fn verify_complete(af: &ArgumentationFramework, s: ArgumentSet) -> bool {
    af.is_conflict_free(s) && af.defended_by(s) == s
}

/// True when `s` is a stable extension: conflict-free and attacking every
/// argument outside `s`. Polynomial time.
pub fn is_stable(af: &ArgumentationFramework, s: ArgumentSet) -> bool {
    if !af.is_conflict_free(s) {
        return false;
    }
    let covered = s.union(af.attacked_by(s));
    (0..af.n()).all(|i| covered.contains(i))
}

/// Per-argument credulous acceptance: 1 when the argument belongs to at
/// least one extension under `semantics`.
pub fn credulous_acceptance(af: &ArgumentationFramework, semantics: Semantics) -> Result<Vec<u8>> {
    if semantics == Semantics::Grounded {
        return Ok(grounded_membership(af));
    }
    let exts = enumerate_extensions(af, semantics)?;
    let mut union = ArgumentSet::empty();
    for e in &exts {
        union = union.union(*e);
    }
    Ok(union.membership(af.n()))
}

/// Per-argument sceptical acceptance: 1 when the argument belongs to every
/// extension under `semantics`. An empty extension family (possible only for
/// stable) accepts every argument vacuously.
pub fn sceptical_acceptance(af: &ArgumentationFramework, semantics: Semantics) -> Result<Vec<u8>> {
    if semantics == Semantics::Grounded {
        return Ok(grounded_membership(af));
    }
    let exts = enumerate_extensions(af, semantics)?;
    if exts.is_empty() {
        return Ok(vec![1; af.n()]);
    }
    let mut inter = exts[0];
    for e in &exts[1..] {
        inter = inter.intersection(*e);
    }
    Ok(inter.membership(af.n()))
}

/// Acceptance relative to a given set, plus whether that set was legal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructiveLabels {
    /// Per-argument acceptance map.
    pub labels: Vec<u8>,
    /// True when at least one extension contains the given set.
    pub legal: bool,
}

/// Per-argument acceptance relative to `given`: 1 when the argument belongs
/// to some extension that contains `given` as a subset.
///
/// When no extension contains `given` (the set is not extensible under
/// `semantics`), every argument is labelled 0 and `legal` is false. The
/// membership reading of relative acceptance is used: candidate extensions
/// are those containing `given`, and acceptance is membership in their
/// union.
pub fn constructive_acceptance(
    af: &ArgumentationFramework,
    semantics: Semantics,
    given: ArgumentSet,
) -> Result<ConstructiveLabels> {
    if semantics == Semantics::Grounded {
        let g = grounded_extension(af)?;
        return Ok(if given.is_subset(g) {
            ConstructiveLabels { labels: g.membership(af.n()), legal: true }
        } else {
            ConstructiveLabels { labels: vec![0; af.n()], legal: false }
        });
    }
    let exts = enumerate_extensions(af, semantics)?;
    let mut union = ArgumentSet::empty();
    let mut legal = false;
    for e in exts.iter().filter(|e| given.is_subset(**e)) {
        legal = true;
        union = union.union(*e);
    }
    Ok(if legal {
        ConstructiveLabels { labels: union.membership(af.n()), legal: true }
    } else {
        ConstructiveLabels { labels: vec![0; af.n()], legal: false }
    })
}

fn grounded_membership(af: &ArgumentationFramework) -> Vec<u8> {
    grounded_labelling(af).iter().map(|l| u8::from(*l == TriLabel::In)).collect()
}
