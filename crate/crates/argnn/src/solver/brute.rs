//! Brute-force reference oracle.
//!
//! Everything here is derived by filtering the powerset with the textbook
//! definitions, written against the raw attack relation only. It shares no
//! machinery with the labelling-based enumerator, so agreement between the
//! two is meaningful evidence of correctness. Exponential time; guarded to
//! small frameworks.

use super::Semantics;
use crate::af::{ArgumentSet, ArgumentationFramework};
use crate::{Error, Result};

/// Largest framework the oracle accepts.
pub const BRUTE_MAX_ARGUMENTS: usize = 16;

fn check_size(af: &ArgumentationFramework) -> Result<()> {
    if af.n() > BRUTE_MAX_ARGUMENTS {
        return Err(Error::resource(format!(
            "brute-force oracle is limited to {BRUTE_MAX_ARGUMENTS} arguments, framework has {}",
            af.n()
        )));
    }
    Ok(())
}

fn members(mask: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask & (1 << i) != 0)
}

fn conflict_free(af: &ArgumentationFramework, mask: u64) -> bool {
    let n = af.n();
    members(mask, n).all(|u| members(mask, n).all(|w| !af.attacks_pair(u, w)))
}

/// Every attacker of `a` is attacked by some member of `mask`.
fn defends(af: &ArgumentationFramework, mask: u64, a: usize) -> bool {
    let n = af.n();
    (0..n)
        .filter(|&b| af.attacks_pair(b, a))
        .all(|b| members(mask, n).any(|c| af.attacks_pair(c, b)))
}

fn admissible(af: &ArgumentationFramework, mask: u64) -> bool {
    conflict_free(af, mask) && members(mask, af.n()).all(|a| defends(af, mask, a))
}

fn complete(af: &ArgumentationFramework, mask: u64) -> bool {
    conflict_free(af, mask)
        && (0..af.n()).all(|a| (mask & (1 << a) != 0) == defends(af, mask, a))
}

fn stable(af: &ArgumentationFramework, mask: u64) -> bool {
    let n = af.n();
    conflict_free(af, mask)
        && (0..n)
            .filter(|&a| mask & (1 << a) == 0)
            .all(|a| members(mask, n).any(|u| af.attacks_pair(u, a)))
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Least fixpoint of the characteristic function, iterated from the empty set.
fn grounded(af: &ArgumentationFramework) -> u64 {
    let mut current = 0u64;
    loop {
        let next = (0..af.n()).filter(|&a| defends(af, current, a)).fold(0u64, |m, a| m | 1 << a);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// All extensions under `semantics`, canonical order.
pub fn extensions(af: &ArgumentationFramework, semantics: Semantics) -> Result<Vec<ArgumentSet>> {
    check_size(af)?;
    let n = af.n();
    let all_masks = 0..(1u64 << n);
    let masks: Vec<u64> = match semantics {
        Semantics::Complete => all_masks.filter(|&m| complete(af, m)).collect(),
        Semantics::Stable => all_masks.filter(|&m| stable(af, m)).collect(),
        Semantics::Preferred => {
            let adm: Vec<u64> = all_masks.filter(|&m| admissible(af, m)).collect();
            adm.iter()
                .copied()
                .filter(|&m| !adm.iter().any(|&o| o != m && subset(m, o)))
                .collect()
        }
        Semantics::Grounded => vec![grounded(af)],
    };
    let mut out: Vec<ArgumentSet> = masks.into_iter().map(ArgumentSet::from_bits).collect();
    out.sort();
    Ok(out)
}

/// Credulous acceptance map from the enumerated family.
pub fn credulous(af: &ArgumentationFramework, semantics: Semantics) -> Result<Vec<u8>> {
    let exts = extensions(af, semantics)?;
    Ok((0..af.n())
        .map(|a| u8::from(exts.iter().any(|e| e.contains(a))))
        .collect())
}

/// Sceptical acceptance map; an empty family accepts everything.
pub fn sceptical(af: &ArgumentationFramework, semantics: Semantics) -> Result<Vec<u8>> {
    let exts = extensions(af, semantics)?;
    Ok((0..af.n())
        .map(|a| u8::from(exts.iter().all(|e| e.contains(a))))
        .collect())
}

/// Acceptance relative to `given`: membership in the union of extensions
/// containing `given`; all zeros when there is no such extension.
pub fn constructive(
    af: &ArgumentationFramework,
    semantics: Semantics,
    given: ArgumentSet,
) -> Result<Vec<u8>> {
    let exts = extensions(af, semantics)?;
    let containing: Vec<&ArgumentSet> = exts.iter().filter(|e| given.is_subset(**e)).collect();
    Ok((0..af.n())
        .map(|a| u8::from(containing.iter().any(|e| e.contains(a))))
        .collect())
}
