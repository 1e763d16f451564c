//! APX text format: `arg(NAME).` and `att(NAME,NAME).` facts, each ended by
//! `.`, typically one per line but any number may share a line.
//!
//! Names match `[A-Za-z0-9_]+`. Blank lines are ignored. Parse errors carry
//! the 1-based line number.

use super::ArgumentationFramework;
use crate::{Error, Result};

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses APX text into a framework.
///
/// Arguments are indexed in order of their `arg` facts. Attacks may appear
/// anywhere but must reference declared arguments. Duplicate `att` facts are
/// collapsed; a duplicate `arg` fact is an error.
pub fn parse_apx(text: &str) -> Result<ArgumentationFramework> {
    let mut names: Vec<String> = Vec::new();
    let mut raw_attacks: Vec<(usize, String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        // '.' only terminates facts, since names cannot contain it.
        let Some(body) = line.strip_suffix('.') else {
            return Err(Error::parse(lineno, format!("expected fact ending in '.': {line:?}")));
        };
        for fact in body.split('.') {
            let fact = fact.trim();
            if let Some(inner) = fact.strip_prefix("arg(").and_then(|r| r.strip_suffix(')')) {
                let name = inner.trim();
                if !valid_name(name) {
                    return Err(Error::parse(lineno, format!("invalid argument name {name:?}")));
                }
                if names.iter().any(|existing| existing == name) {
                    return Err(Error::parse(lineno, format!("duplicate argument {name:?}")));
                }
                names.push(name.to_string());
            } else if let Some(inner) = fact.strip_prefix("att(").and_then(|r| r.strip_suffix(')')) {
                let mut parts = inner.splitn(2, ',');
                let (Some(u), Some(w)) = (parts.next(), parts.next()) else {
                    return Err(Error::parse(
                        lineno,
                        format!("expected att(SOURCE,TARGET): {fact:?}"),
                    ));
                };
                let (u, w) = (u.trim(), w.trim());
                if !valid_name(u) || !valid_name(w) {
                    return Err(Error::parse(lineno, format!("invalid name in attack: {fact:?}")));
                }
                raw_attacks.push((lineno, u.to_string(), w.to_string()));
            } else {
                return Err(Error::parse(lineno, format!("unrecognised fact: {fact:?}")));
            }
        }
    }

    let index = |lineno: usize, name: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::parse(lineno, format!("attack references undeclared argument {name:?}")))
    };
    let mut attacks = Vec::with_capacity(raw_attacks.len());
    for (lineno, u, w) in &raw_attacks {
        attacks.push((index(*lineno, u)?, index(*lineno, w)?));
    }
    ArgumentationFramework::new(names, attacks)
}

/// Serializes a framework as APX: all `arg` facts, then all `att` facts.
pub fn to_apx(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for name in af.names() {
        out.push_str("arg(");
        out.push_str(name);
        out.push_str(").\n");
    }
    for &(u, w) in af.attacks() {
        out.push_str("att(");
        out.push_str(af.name(u));
        out.push(',');
        out.push_str(af.name(w));
        out.push_str(").\n");
    }
    out
}
