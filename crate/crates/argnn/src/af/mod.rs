//! Argumentation frameworks and argument sets.
//!
//! A framework is a finite directed graph: nodes are arguments, an edge
//! `(u, w)` means `u` attacks `w`. Self-attacks are allowed. Attacks are
//! stored deduplicated; the attack relation is a set.

mod apx;

pub use apx::{parse_apx, to_apx};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Hard cap for set-based solver operations (bitmask representation).
pub const MAX_ARGUMENTS: usize = 64;

/// A set of argument indices over a framework with at most 64 arguments.
///
/// Backed by a `u64` bitmask. Ordering is lexicographic over the ascending
/// list of member indices, which is the canonical order used whenever
/// collections of extensions are returned or serialized.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArgumentSet {
    bits: u64,
}

impl ArgumentSet {
    pub const fn empty() -> Self {
        ArgumentSet { bits: 0 }
    }

    pub const fn from_bits(bits: u64) -> Self {
        ArgumentSet { bits }
    }

    pub const fn bits(self) -> u64 {
        self.bits
    }

    /// Builds a set from indices, validating each against `n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, n: usize) -> Result<Self> {
        if n > MAX_ARGUMENTS {
            return Err(Error::resource(format!(
                "argument sets support at most {MAX_ARGUMENTS} arguments, got {n}"
            )));
        }
        let mut bits = 0u64;
        for i in indices {
            if i >= n {
                return Err(Error::usage(format!(
                    "argument index {i} out of range for framework of size {n}"
                )));
            }
            bits |= 1 << i;
        }
        Ok(ArgumentSet { bits })
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < MAX_ARGUMENTS);
        self.bits |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < MAX_ARGUMENTS);
        self.bits &= !(1 << i);
    }

    pub fn with(self, i: usize) -> Self {
        debug_assert!(i < MAX_ARGUMENTS);
        ArgumentSet { bits: self.bits | (1 << i) }
    }

    pub const fn contains(self, i: usize) -> bool {
        i < MAX_ARGUMENTS && self.bits & (1 << i) != 0
    }

    pub const fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub const fn is_subset(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub const fn is_disjoint(self, other: Self) -> bool {
        self.bits & other.bits == 0
    }

    pub const fn union(self, other: Self) -> Self {
        ArgumentSet { bits: self.bits | other.bits }
    }

    pub const fn intersection(self, other: Self) -> Self {
        ArgumentSet { bits: self.bits & other.bits }
    }

    pub const fn difference(self, other: Self) -> Self {
        ArgumentSet { bits: self.bits & !other.bits }
    }

    /// Ascending member indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Membership map of length `n`: 1 for members, 0 otherwise.
    pub fn membership(self, n: usize) -> Vec<u8> {
        (0..n).map(|i| u8::from(self.contains(i))).collect()
    }
}

impl Ord for ArgumentSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ArgumentSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ArgumentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for ArgumentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ArgumentSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

/// A Dung argumentation framework: named arguments plus an attack relation.
///
/// Immutable after construction, so values are safe to share across threads.
/// Arguments are addressed by dense index `0..n`; names are kept for I/O.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawAf", into = "RawAf")]
pub struct ArgumentationFramework {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    /// Deduplicated, sorted by (source, target).
    attacks: Vec<(usize, usize)>,
    /// Per argument: sorted attacker indices.
    attackers: Vec<Vec<usize>>,
    /// Per argument: sorted target indices.
    targets: Vec<Vec<usize>>,
}

/// Serialized shape: just names and attack pairs.
#[derive(Serialize, Deserialize)]
struct RawAf {
    names: Vec<String>,
    attacks: Vec<(usize, usize)>,
}

impl TryFrom<RawAf> for ArgumentationFramework {
    type Error = Error;
    fn try_from(raw: RawAf) -> Result<Self> {
        ArgumentationFramework::new(raw.names, raw.attacks)
    }
}

impl From<ArgumentationFramework> for RawAf {
    fn from(af: ArgumentationFramework) -> RawAf {
        RawAf { names: af.names, attacks: af.attacks }
    }
}

impl ArgumentationFramework {
    /// Builds a framework, validating names and attack endpoints.
    /// Duplicate attacks are silently collapsed; duplicate names are an error.
    pub fn new(names: Vec<String>, mut attacks: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        let mut name_index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::usage(format!(
                    "argument name {name:?} must be non-empty and match [A-Za-z0-9_]+"
                )));
            }
            if name_index.insert(name.clone(), i).is_some() {
                return Err(Error::usage(format!("duplicate argument name {name:?}")));
            }
        }
        for &(u, w) in &attacks {
            if u >= n || w >= n {
                return Err(Error::usage(format!(
                    "attack ({u}, {w}) out of range for framework of size {n}"
                )));
            }
        }
        attacks.sort_unstable();
        attacks.dedup();
        let mut attackers = vec![Vec::new(); n];
        let mut targets = vec![Vec::new(); n];
        for &(u, w) in &attacks {
            attackers[w].push(u);
            targets[u].push(w);
        }
        for list in attackers.iter_mut().chain(targets.iter_mut()) {
            list.sort_unstable();
        }
        Ok(ArgumentationFramework { names, name_index, attacks, attackers, targets })
    }

    /// Convenience constructor with generated names `a0..a{n-1}`.
    pub fn from_edges(n: usize, attacks: Vec<(usize, usize)>) -> Result<Self> {
        let names = (0..n).map(|i| format!("a{i}")).collect();
        ArgumentationFramework::new(names, attacks)
    }

    /// Convenience constructor from named attack pairs.
    pub fn from_named(names: &[&str], attacks: &[(&str, &str)]) -> Result<Self> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let mut index = HashMap::new();
        for (i, name) in owned.iter().enumerate() {
            index.insert(name.clone(), i);
        }
        let mut pairs = Vec::with_capacity(attacks.len());
        for &(u, w) in attacks {
            let ui = *index
                .get(u)
                .ok_or_else(|| Error::usage(format!("unknown argument {u:?} in attack")))?;
            let wi = *index
                .get(w)
                .ok_or_else(|| Error::usage(format!("unknown argument {w:?} in attack")))?;
            pairs.push((ui, wi));
        }
        ArgumentationFramework::new(owned, pairs)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    /// Attack pairs, deduplicated and sorted by (source, target).
    pub fn attacks(&self) -> &[(usize, usize)] {
        &self.attacks
    }

    /// Sorted indices of arguments attacking `i`. No size bound.
    pub fn attacker_indices(&self, i: usize) -> &[usize] {
        &self.attackers[i]
    }

    /// Sorted indices of arguments attacked by `i`. No size bound.
    pub fn target_indices(&self, i: usize) -> &[usize] {
        &self.targets[i]
    }

    /// Attackers of `i` as a set. Errors if the framework exceeds
    /// [`MAX_ARGUMENTS`] or `i` is out of range.
    pub fn attackers(&self, i: usize) -> Result<ArgumentSet> {
        if i >= self.n() {
            return Err(Error::usage(format!(
                "argument index {i} out of range for framework of size {}",
                self.n()
            )));
        }
        ArgumentSet::from_indices(self.attackers[i].iter().copied(), self.n())
    }

    pub fn attacks_pair(&self, u: usize, w: usize) -> bool {
        self.targets[u].binary_search(&w).is_ok()
    }

    /// True when no member of `s` attacks a member of `s`.
    pub fn is_conflict_free(&self, s: ArgumentSet) -> bool {
        debug_assert!(self.n() <= MAX_ARGUMENTS);
        for u in s.iter() {
            for &w in &self.targets[u] {
                if s.contains(w) {
                    return false;
                }
            }
        }
        true
    }

    /// Arguments attacked by at least one member of `s`.
    pub fn attacked_by(&self, s: ArgumentSet) -> ArgumentSet {
        let mut out = ArgumentSet::empty();
        for u in s.iter() {
            for &w in &self.targets[u] {
                out.insert(w);
            }
        }
        out
    }

    /// True when every attacker of `a` is attacked by some member of `s`.
    pub fn defends(&self, s: ArgumentSet, a: usize) -> bool {
        let counters = self.attacked_by(s);
        self.attackers[a].iter().all(|&b| counters.contains(b))
    }

    /// The set of all arguments defended by `s` (the characteristic function).
    pub fn defended_by(&self, s: ArgumentSet) -> ArgumentSet {
        let counters = self.attacked_by(s);
        let mut out = ArgumentSet::empty();
        for a in 0..self.n() {
            if self.attackers[a].iter().all(|&b| counters.contains(b)) {
                out.insert(a);
            }
        }
        out
    }

    /// Member names of `s`, index order.
    pub fn set_names(&self, s: ArgumentSet) -> Vec<&str> {
        s.iter().map(|i| self.name(i)).collect()
    }

    /// Parses a comma-separated list of argument names into a set.
    pub fn set_from_names(&self, spec: &str) -> Result<ArgumentSet> {
        let mut out = ArgumentSet::empty();
        if self.n() > MAX_ARGUMENTS {
            return Err(Error::resource(format!(
                "argument sets support at most {MAX_ARGUMENTS} arguments"
            )));
        }
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i = self
                .index_of(part)
                .ok_or_else(|| Error::usage(format!("unknown argument name {part:?}")))?;
            out.insert(i);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_ordering_is_lexicographic_on_member_lists() {
        let a = ArgumentSet::from_indices([0, 1], 4).unwrap();
        let b = ArgumentSet::from_indices([2], 4).unwrap();
        let c = ArgumentSet::from_indices([1], 4).unwrap();
        let d = ArgumentSet::from_indices([0, 2], 4).unwrap();
        assert!(a < b);
        // [0,2] precedes [1] even though its bitmask is numerically larger.
        assert!(d < c);
        let mut v = vec![c, b, a, d, ArgumentSet::empty()];
        v.sort();
        assert_eq!(
            v.iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
            vec![vec![], vec![0, 1], vec![0, 2], vec![1], vec![2]]
        );
    }

    #[test]
    fn set_operations() {
        let s = ArgumentSet::from_indices([1, 3], 5).unwrap();
        let t = ArgumentSet::from_indices([3, 4], 5).unwrap();
        assert_eq!(s.union(t).to_vec(), vec![1, 3, 4]);
        assert_eq!(s.intersection(t).to_vec(), vec![3]);
        assert_eq!(s.difference(t).to_vec(), vec![1]);
        assert!(s.contains(3) && !s.contains(0));
        assert_eq!(s.len(), 2);
        assert!(s.is_subset(s.union(t)));
        assert!(!t.is_disjoint(s));
        assert_eq!(s.membership(5), vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn from_indices_rejects_out_of_range() {
        assert!(ArgumentSet::from_indices([4], 4).is_err());
        assert!(ArgumentSet::from_indices([0], 65).is_err());
        assert!(ArgumentSet::from_indices([63], 64).is_ok());
    }

    #[test]
    fn framework_dedups_attacks_and_builds_adjacency() {
        let af = ArgumentationFramework::from_edges(3, vec![(0, 1), (0, 1), (1, 2), (2, 2)])
            .unwrap();
        assert_eq!(af.attacks(), &[(0, 1), (1, 2), (2, 2)]);
        assert_eq!(af.attacker_indices(2), &[1, 2]);
        assert_eq!(af.target_indices(2), &[2]);
        assert!(af.attacks_pair(0, 1));
        assert!(!af.attacks_pair(1, 0));
    }

    #[test]
    fn framework_rejects_bad_input() {
        assert!(ArgumentationFramework::from_edges(2, vec![(0, 2)]).is_err());
        assert!(ArgumentationFramework::new(
            vec!["a".into(), "a".into()],
            vec![]
        )
        .is_err());
        assert!(ArgumentationFramework::new(vec!["a b".into()], vec![]).is_err());
    }

    #[test]
    fn predicates_follow_definitions() {
        // a -> b -> c, c <-> d
        let af = ArgumentationFramework::from_named(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "c")],
        )
        .unwrap();
        let n = af.n();
        let set = |v: &[usize]| ArgumentSet::from_indices(v.iter().copied(), n).unwrap();

        assert!(af.is_conflict_free(set(&[0, 2])));
        assert!(!af.is_conflict_free(set(&[0, 1])));
        assert!(!af.is_conflict_free(set(&[2, 3])));

        // a is unattacked, so every set defends it. c is attacked by both
        // b and d, so defending c takes a (against b) and c itself
        // (against d).
        assert!(af.defends(ArgumentSet::empty(), 0));
        assert!(!af.defends(set(&[0]), 2));
        assert!(af.defends(set(&[0, 2]), 2));
        assert!(!af.defends(ArgumentSet::empty(), 2));
        // d's attacker c is attacked by d itself.
        assert!(af.defends(set(&[3]), 3));

        assert_eq!(af.attacked_by(set(&[0, 2])).to_vec(), vec![1, 3]);
        assert_eq!(af.defended_by(ArgumentSet::empty()).to_vec(), vec![0]);
        assert_eq!(af.defended_by(set(&[0])).to_vec(), vec![0]);
        assert_eq!(af.defended_by(set(&[0, 2])).to_vec(), vec![0, 2]);
    }

    #[test]
    fn self_attacker_is_never_conflict_free() {
        let af = ArgumentationFramework::from_edges(1, vec![(0, 0)]).unwrap();
        assert!(!af.is_conflict_free(ArgumentSet::from_indices([0], 1).unwrap()));
        assert!(af.is_conflict_free(ArgumentSet::empty()));
    }

    #[test]
    fn set_from_names_parses_and_validates() {
        let af = ArgumentationFramework::from_named(&["a", "b", "c"], &[("a", "b")]).unwrap();
        assert_eq!(af.set_from_names("a, c").unwrap().to_vec(), vec![0, 2]);
        assert_eq!(af.set_from_names("").unwrap(), ArgumentSet::empty());
        assert!(af.set_from_names("a,zz").is_err());
    }
}
