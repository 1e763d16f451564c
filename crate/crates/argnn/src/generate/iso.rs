//! Structural signatures and exact isomorphism for attack graphs.
//!
//! The signature comes from iterative in/out-degree colour refinement: start
//! from degree pairs, repeatedly rehash each node with the sorted colour
//! multisets of its attackers and targets, stop when the number of colour
//! classes stabilises. Isomorphic frameworks always get equal signatures;
//! distinct frameworks may collide, which dedup treats conservatively as
//! duplicates. Exact isomorphism is decided by colour-pruned backtracking
//! and is guarded to small frameworks.

use crate::af::ArgumentationFramework;
use crate::{to_hex, Error, Result};
use sha2::{Digest, Sha256};

/// Size cap for exact isomorphism checks.
pub const ISO_MAX_ARGUMENTS: usize = 12;

fn fnv1a_u64(seed: u64, words: &[u64]) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

fn distinct_count(colors: &[u64]) -> usize {
    let mut sorted = colors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Stable colour per node after refinement converges.
pub(crate) fn refined_colors(af: &ArgumentationFramework) -> Vec<u64> {
    let n = af.n();
    let mut colors: Vec<u64> = (0..n)
        .map(|i| {
            fnv1a_u64(1, &[af.attacker_indices(i).len() as u64, af.target_indices(i).len() as u64])
        })
        .collect();
    let mut classes = distinct_count(&colors);
    for round in 0..n.max(1) {
        let next: Vec<u64> = (0..n)
            .map(|i| {
                let mut words = Vec::with_capacity(
                    2 + af.attacker_indices(i).len() + af.target_indices(i).len(),
                );
                words.push(colors[i]);
                let mut inc: Vec<u64> =
                    af.attacker_indices(i).iter().map(|&b| colors[b]).collect();
                inc.sort_unstable();
                words.extend(inc);
                words.push(u64::MAX); // separator between attacker and target multisets
                let mut out: Vec<u64> =
                    af.target_indices(i).iter().map(|&t| colors[t]).collect();
                out.sort_unstable();
                words.extend(out);
                fnv1a_u64(round as u64 + 2, &words)
            })
            .collect();
        let next_classes = distinct_count(&next);
        colors = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    colors
}

/// Label-independent structural signature: 32 hex characters.
///
/// Equal for isomorphic frameworks; collisions between non-isomorphic
/// frameworks are possible but rare.
pub fn canonical_signature(af: &ArgumentationFramework) -> String {
    let colors = refined_colors(af);
    let mut node_colors = colors.clone();
    node_colors.sort_unstable();
    let mut edge_colors: Vec<(u64, u64)> =
        af.attacks().iter().map(|&(u, w)| (colors[u], colors[w])).collect();
    edge_colors.sort_unstable();

    let mut hasher = Sha256::new();
    hasher.update((af.n() as u64).to_le_bytes());
    hasher.update((af.attacks().len() as u64).to_le_bytes());
    for c in &node_colors {
        hasher.update(c.to_le_bytes());
    }
    for (cu, cw) in &edge_colors {
        hasher.update(cu.to_le_bytes());
        hasher.update(cw.to_le_bytes());
    }
    let digest = hasher.finalize();
    to_hex(&digest[..16])
}

/// Decides attack-graph isomorphism exactly.
///
/// Errors with a resource limit above [`ISO_MAX_ARGUMENTS`] arguments.
pub fn is_isomorphic_exact(
    a: &ArgumentationFramework,
    b: &ArgumentationFramework,
) -> Result<bool> {
    let n = a.n();
    if n > ISO_MAX_ARGUMENTS || b.n() > ISO_MAX_ARGUMENTS {
        return Err(Error::resource(format!(
            "exact isomorphism is limited to {ISO_MAX_ARGUMENTS} arguments"
        )));
    }
    if n != b.n() || a.attacks().len() != b.attacks().len() {
        return Ok(false);
    }
    let ca = refined_colors(a);
    let cb = refined_colors(b);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(false);
    }

    // Map nodes of `a` in ascending order onto colour-compatible nodes of `b`,
    // checking adjacency against everything mapped so far.
    fn extend(
        a: &ArgumentationFramework,
        b: &ArgumentationFramework,
        ca: &[u64],
        cb: &[u64],
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let u = mapping.len();
        if u == a.n() {
            return true;
        }
        for v in 0..b.n() {
            if used[v] || ca[u] != cb[v] {
                continue;
            }
            if a.attacks_pair(u, u) != b.attacks_pair(v, v) {
                continue;
            }
            let consistent = mapping.iter().enumerate().all(|(w, &mw)| {
                a.attacks_pair(u, w) == b.attacks_pair(v, mw)
                    && a.attacks_pair(w, u) == b.attacks_pair(mw, v)
            });
            if !consistent {
                continue;
            }
            mapping.push(v);
            used[v] = true;
            if extend(a, b, ca, cb, mapping, used) {
                return true;
            }
            used[v] = false;
            mapping.pop();
        }
        false
    }

    let mut mapping = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(extend(a, b, &ca, &cb, &mut mapping, &mut used))
}
