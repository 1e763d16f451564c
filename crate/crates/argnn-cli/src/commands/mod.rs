pub mod enumerate;
pub mod eval;
pub mod generate;
pub mod make_dataset;
pub mod scaling;
pub mod solve;
pub mod trace;
pub mod train;

use argnn::{Error, Result};
use std::path::Path;

/// Parses `LO..HI` (inclusive bounds) or a single `N`.
pub fn parse_range(spec: &str) -> Result<(usize, usize)> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::usage(format!("invalid argument count {s:?} in range {spec:?}")))
    };
    match spec.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => {
            let n = parse(spec)?;
            Ok((n, n))
        }
    }
}

/// Parses a comma-separated list of positive integers, e.g. `2,4,8`.
pub fn parse_usize_list(spec: &str, what: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let value: usize = part
            .parse()
            .map_err(|_| Error::usage(format!("invalid {what} {part:?} in {spec:?}")))?;
        if value == 0 {
            return Err(Error::usage(format!("{what} must be positive, got 0 in {spec:?}")));
        }
        out.push(value);
    }
    if out.is_empty() {
        return Err(Error::usage(format!("empty {what} list {spec:?}")));
    }
    Ok(out)
}

pub fn read_apx_file(path: &Path) -> Result<argnn::af::ArgumentationFramework> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    argnn::af::parse_apx(&text)
}
