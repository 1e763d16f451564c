//! Extension enumeration as a tree search over accepted-argument additions.
//!
//! Starting from the empty set, each node asks a label source which
//! arguments are accepted relative to the current set `S`. When the
//! accepted set equals `S`, the node is a leaf and `S` is returned as an
//! extension; otherwise the children `S ∪ {a}` for accepted `a ∉ S` are
//! explored depth-first in ascending argument order. A subtree is pruned
//! when `S` itself contains a rejected argument, and visited sets are
//! memoized so each distinct set is expanded once.
//!
//! With the exact label source the search reproduces direct enumeration for
//! grounded, preferred, and stable semantics. Complete extensions that are
//! strict subsets of other complete extensions are never leaves, so for
//! complete semantics the search optionally verifies every visited set with
//! the polynomial fixpoint check and records the ones that pass; this is on
//! by default.

use crate::af::{ArgumentSet, ArgumentationFramework};
use crate::model::{self, ModelParameters};
use crate::solver::{constructive_acceptance, is_stable, verify_complete, Semantics};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Produces one acceptance label per argument, relative to a given set.
pub trait LabelSource {
    fn labels(&self, af: &ArgumentationFramework, given: ArgumentSet) -> Result<Vec<u8>>;
}

/// Exact labels from the solver.
#[derive(Clone, Copy, Debug)]
pub struct ExactSource {
    pub semantics: Semantics,
}

impl ExactSource {
    pub fn new(semantics: Semantics) -> Self {
        ExactSource { semantics }
    }
}

impl LabelSource for ExactSource {
    fn labels(&self, af: &ArgumentationFramework, given: ArgumentSet) -> Result<Vec<u8>> {
        Ok(constructive_acceptance(af, self.semantics, given)?.labels)
    }
}

/// Labels from a trained model's thresholded likelihoods.
#[derive(Clone, Copy, Debug)]
pub struct ModelSource<'a> {
    params: &'a ModelParameters,
    steps: usize,
}

impl<'a> ModelSource<'a> {
    pub fn new(params: &'a ModelParameters, steps: usize) -> Self {
        assert!(steps >= 1, "inference needs at least one step");
        ModelSource { params, steps }
    }
}

impl LabelSource for ModelSource<'_> {
    fn labels(&self, af: &ArgumentationFramework, given: ArgumentSet) -> Result<Vec<u8>> {
        model::predict(self.params, af, Some(&given), self.steps)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    /// For complete semantics: record every visited set that passes the
    /// polynomial completeness check instead of leaves only.
    pub verify_complete: bool,
    /// Upper bound on expanded nodes per framework.
    pub node_budget: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { verify_complete: true, node_budget: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Nodes whose labels were computed.
    pub expanded: usize,
    /// Label-source invocations; one per expanded node.
    pub source_calls: usize,
    /// Subtrees cut because the current set contained a rejected argument.
    pub pruned_subtrees: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Canonically ordered distinct extensions found.
    pub extensions: Vec<ArgumentSet>,
    pub stats: SearchStats,
    /// True when the node budget stopped the search early.
    pub incomplete: bool,
}

/// True when the set contains an argument its own labels reject. Such a set
/// is contained in no extension, so its subtree cannot hold any leaf.
pub fn prune_illegal(s: ArgumentSet, labels: &[u8]) -> bool {
    s.iter().any(|a| labels[a] == 0)
}

/// Depth-first enumeration guided by `source`.
pub fn enumerate_by_search(
    af: &ArgumentationFramework,
    semantics: Semantics,
    source: &dyn LabelSource,
    options: &SearchOptions,
) -> Result<SearchResult> {
    let verify = semantics == Semantics::Complete && options.verify_complete;
    let mut stats = SearchStats::default();
    let mut incomplete = false;
    let mut found: Vec<ArgumentSet> = Vec::new();
    let mut visited: HashSet<u64> = HashSet::new();
    let mut stack: Vec<ArgumentSet> = vec![ArgumentSet::empty()];
    visited.insert(ArgumentSet::empty().bits());

    while let Some(s) = stack.pop() {
        if stats.expanded >= options.node_budget {
            incomplete = true;
            break;
        }
        stats.expanded += 1;
        let labels = source.labels(af, s)?;
        stats.source_calls += 1;
        let accepted: ArgumentSet =
            labels.iter().enumerate().filter(|(_, &l)| l == 1).map(|(i, _)| i).collect();

        if verify {
            if verify_complete(af, s) {
                found.push(s);
            }
        } else if accepted == s {
            // An all-reject answer at the empty set claims that no
            // extension exists at all, which only stable semantics allows;
            // the polynomial check separates "no stable extension" from
            // "the empty set is stable".
            let empty_leaf_ok = semantics != Semantics::Stable
                || !s.is_empty()
                || is_stable(af, s);
            if empty_leaf_ok {
                found.push(s);
            }
        }
        if prune_illegal(s, &labels) {
            stats.pruned_subtrees += 1;
            continue;
        }
        // Reverse push so the stack pops children in ascending order.
        for a in accepted.difference(s).to_vec().into_iter().rev() {
            let child = s.with(a);
            if visited.insert(child.bits()) {
                stack.push(child);
            }
        }
    }

    found.sort();
    found.dedup();
    Ok(SearchResult { extensions: found, stats, incomplete })
}

/// Set-level precision and recall of a found family against the truth.
///
/// An empty found family has precision 1 by convention (recall then carries
/// the penalty); an empty truth family has recall 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationMetrics {
    pub precision: f64,
    pub recall: f64,
}

pub fn enumeration_metrics(found: &[ArgumentSet], truth: &[ArgumentSet]) -> EnumerationMetrics {
    let truth_set: HashSet<u64> = truth.iter().map(|s| s.bits()).collect();
    let found_set: HashSet<u64> = found.iter().map(|s| s.bits()).collect();
    let hits = found_set.iter().filter(|b| truth_set.contains(b)).count();
    let precision = if found_set.is_empty() { 1.0 } else { hits as f64 / found_set.len() as f64 };
    let recall = if truth_set.is_empty() { 1.0 } else { hits as f64 / truth_set.len() as f64 };
    EnumerationMetrics { precision, recall }
}

/// Accumulates per-framework metrics and the pooled counts over a corpus.
///
/// The macro (mean of per-framework) and pooled (global counts) views can
/// differ; reports carry both.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EnumerationAggregate {
    pub per_af: Vec<EnumerationMetrics>,
    hits: usize,
    found_total: usize,
    truth_total: usize,
}

impl EnumerationAggregate {
    pub fn add(&mut self, found: &[ArgumentSet], truth: &[ArgumentSet]) -> EnumerationMetrics {
        let m = enumeration_metrics(found, truth);
        self.per_af.push(m);
        let truth_set: HashSet<u64> = truth.iter().map(|s| s.bits()).collect();
        let found_set: HashSet<u64> = found.iter().map(|s| s.bits()).collect();
        self.hits += found_set.iter().filter(|b| truth_set.contains(b)).count();
        self.found_total += found_set.len();
        self.truth_total += truth_set.len();
        m
    }

    pub fn mean_precision(&self) -> f64 {
        mean(self.per_af.iter().map(|m| m.precision))
    }

    pub fn mean_recall(&self) -> f64 {
        mean(self.per_af.iter().map(|m| m.recall))
    }

    pub fn pooled_precision(&self) -> f64 {
        if self.found_total == 0 {
            1.0
        } else {
            self.hits as f64 / self.found_total as f64
        }
    }

    pub fn pooled_recall(&self) -> f64 {
        if self.truth_total == 0 {
            1.0
        } else {
            self.hits as f64 / self.truth_total as f64
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v;
        count += 1;
    }
    if count == 0 {
        1.0
    } else {
        sum / count as f64
    }
}
