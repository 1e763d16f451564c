//! Per-step forward traces and their CSV form.

use crate::numerics::nn::sigmoid;
use crate::{Error, Result};
use std::io::Write;

/// Logits for every argument after every message-passing step.
///
/// Step indices are 1-based: step `t` is the readout taken after the t-th
/// update, matching the row order of the CSV dump.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace {
    names: Vec<String>,
    steps: usize,
    /// Step-major: entry `(t-1) * n + i` is the logit of argument `i`
    /// after step `t`.
    logits: Vec<f64>,
}

impl ForwardTrace {
    pub fn new(names: Vec<String>, steps: usize, logits: Vec<f64>) -> Self {
        assert_eq!(logits.len(), steps * names.len(), "trace shape");
        ForwardTrace { names, steps, logits }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn logit(&self, step: usize, arg: usize) -> f64 {
        assert!((1..=self.steps).contains(&step), "step {step} out of range");
        self.logits[(step - 1) * self.n() + arg]
    }

    pub fn likelihood(&self, step: usize, arg: usize) -> f64 {
        sigmoid(self.logit(step, arg))
    }

    /// Likelihoods after the last step, in argument order.
    pub fn final_likelihoods(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.likelihood(self.steps, i)).collect()
    }
}

/// Writes a trace as CSV. Numbers use 17 significant digits so parsing the
/// dump recovers the exact values.
pub fn dump_trace(trace: &ForwardTrace, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "step,argument,logit,likelihood")?;
    for t in 1..=trace.steps() {
        for (i, name) in trace.names().iter().enumerate() {
            let o = trace.logit(t, i);
            writeln!(out, "{t},{name},{o:.16e},{:.16e}", sigmoid(o))?;
        }
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::parse(line, format!("bad {what}: {s:?}")))
}

/// Parses a CSV produced by [`dump_trace`].
pub fn parse_trace(input: &str) -> Result<ForwardTrace> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "step,argument,logit,likelihood" => {}
        Some((_, header)) => {
            return Err(Error::parse(1, format!("unexpected header {header:?}")))
        }
        None => return Err(Error::parse(1, "empty trace")),
    }

    let mut names: Vec<String> = Vec::new();
    let mut logits: Vec<f64> = Vec::new();
    let mut steps = 0usize;
    let mut col = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(lineno, format!("expected 4 fields, got {}", fields.len())));
        }
        let step: usize = parse_field(fields[0], lineno, "step")?;
        let name = fields[1].trim();
        let logit: f64 = parse_field(fields[2], lineno, "logit")?;
        let likelihood: f64 = parse_field(fields[3], lineno, "likelihood")?;
        if (likelihood - sigmoid(logit)).abs() > 1e-9 {
            return Err(Error::parse(lineno, "likelihood does not match logit"));
        }

        if step == steps + 1 && (steps == 0 || col == names.len()) {
            steps = step;
            col = 0;
        } else if step != steps {
            return Err(Error::parse(lineno, format!("unexpected step {step}")));
        }
        if steps == 1 {
            if names.iter().any(|n| n == name) {
                return Err(Error::parse(lineno, format!("duplicate argument {name:?}")));
            }
            names.push(name.to_string());
        } else if names.get(col).map(String::as_str) != Some(name) {
            return Err(Error::parse(lineno, format!("unexpected argument {name:?}")));
        }
        logits.push(logit);
        col += 1;
    }
    if steps == 0 {
        return Err(Error::parse(2, "trace has no rows"));
    }
    if col != names.len() {
        return Err(Error::parse(
            input.lines().count(),
            "final step is missing arguments",
        ));
    }
    Ok(ForwardTrace::new(names, steps, logits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ForwardTrace {
        ForwardTrace::new(
            vec!["a".into(), "b".into()],
            2,
            vec![0.125, -3.5, 1.0 / 3.0, 42.0],
        )
    }

    #[test]
    fn dump_has_header_and_one_row_per_step_argument() {
        let mut buf = Vec::new();
        dump_trace(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "step,argument,logit,likelihood");
        assert!(lines[1].starts_with("1,a,"));
        assert!(lines[2].starts_with("1,b,"));
        assert!(lines[3].starts_with("2,a,"));
        assert!(lines[4].starts_with("2,b,"));
    }

    #[test]
    fn dump_then_parse_recovers_exact_values() {
        let trace = sample();
        let mut buf = Vec::new();
        dump_trace(&trace, &mut buf).unwrap();
        let parsed = parse_trace(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(parsed.names(), trace.names());
        assert_eq!(parsed.steps(), trace.steps());
        for t in 1..=2 {
            for i in 0..2 {
                assert_eq!(parsed.logit(t, i).to_bits(), trace.logit(t, i).to_bits());
            }
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_trace("").is_err());
        assert!(parse_trace("step,argument\n").is_err());
        let ok = "step,argument,logit,likelihood\n1,a,0.0,0.5\n";
        assert!(parse_trace(ok).is_ok());
        // Likelihood inconsistent with the logit.
        let bad = "step,argument,logit,likelihood\n1,a,0.0,0.9\n";
        match parse_trace(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        // Steps out of order.
        let bad = "step,argument,logit,likelihood\n2,a,0.0,0.5\n";
        assert!(parse_trace(bad).is_err());
        // Second step renames the argument.
        let bad =
            "step,argument,logit,likelihood\n1,a,0.0,0.5\n2,z,0.0,0.5\n";
        assert!(parse_trace(bad).is_err());
        // Truncated final step.
        let bad = "step,argument,logit,likelihood\n1,a,0.0,0.5\n1,b,0.0,0.5\n2,a,0.0,0.5\n";
        assert!(parse_trace(bad).is_err());
    }

    #[test]
    fn final_likelihoods_use_last_step() {
        let trace = sample();
        let fin = trace.final_likelihoods();
        assert_eq!(fin.len(), 2);
        assert!((fin[0] - sigmoid(1.0 / 3.0)).abs() < 1e-15);
        assert!((fin[1] - sigmoid(42.0)).abs() < 1e-15);
    }
}
