//! Initial data from a builtin expression or a coefficient file.
//!
//! Builtins: `cosine(eps)`, `delta(n, amp)` and `random_fl(s, p, R, seed)`.
//! A file holds one mode per line as `n re im` (whitespace separated); blank
//! lines and lines starting with `#` are skipped, and unlisted modes are zero.
//! Values are Fourier coefficients as used by the solvers, no rescaling.

use std::path::Path;

use mkdv_series::initial::{cosine, delta, random_fl};
use mkdv_series::{CoeffSeq, Complex64};

use crate::error::CliError;

pub fn load_initial_data(source: &str, cutoff: usize) -> Result<CoeffSeq, CliError> {
    let source = source.trim();
    if let Some((name, args)) = builtin_call(source) {
        return builtin(name, &args, cutoff);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Invalid(format!("initial data {source:?} is neither a builtin nor an existing file"))
        } else {
            CliError::Io { path: source.to_string(), source: e }
        }
    })?;
    parse_coefficients(&text, cutoff).map_err(|e| CliError::Invalid(format!("{source}:{e}")))
}

fn builtin_call(source: &str) -> Option<(&str, Vec<&str>)> {
    let open = source.find('(')?;
    let inner = source[open + 1..].strip_suffix(')')?;
    let name = &source[..open];
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
    Some((name, args))
}

fn builtin(name: &str, args: &[&str], cutoff: usize) -> Result<CoeffSeq, CliError> {
    let num = |i: usize| -> Result<f64, CliError> {
        args[i].parse::<f64>().map_err(|e| CliError::Invalid(format!("{name}: argument {} {:?}: {e}", i + 1, args[i])))
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(CliError::Invalid(format!("{name} takes {n} arguments, got {}", args.len())))
        }
    };
    let data = match name {
        "cosine" => {
            arity(1)?;
            cosine(num(0)?, cutoff)?
        }
        "delta" => {
            arity(2)?;
            let n = args[0].parse::<i64>().map_err(|e| CliError::Invalid(format!("delta: mode {:?}: {e}", args[0])))?;
            delta(n, Complex64::new(num(1)?, 0.0), cutoff)?
        }
        "random_fl" => {
            arity(4)?;
            let seed =
                args[3].parse::<u64>().map_err(|e| CliError::Invalid(format!("random_fl: seed {:?}: {e}", args[3])))?;
            random_fl(cutoff, num(0)?, num(1)?, num(2)?, seed)?
        }
        other => return Err(CliError::Invalid(format!("unknown builtin {other:?}"))),
    };
    Ok(data)
}

/// Errors carry a `line: message` prefix.
fn parse_coefficients(text: &str, cutoff: usize) -> Result<CoeffSeq, String> {
    let mut a = CoeffSeq::zeros(cutoff);
    let mut seen = std::collections::BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(format!("{lineno}: expected `n re im`, found {} fields", fields.len()));
        }
        let n: i64 = fields[0].parse().map_err(|e| format!("{lineno}: mode {:?}: {e}", fields[0]))?;
        let re: f64 = fields[1].parse().map_err(|e| format!("{lineno}: real part {:?}: {e}", fields[1]))?;
        let im: f64 = fields[2].parse().map_err(|e| format!("{lineno}: imaginary part {:?}: {e}", fields[2]))?;
        if n.unsigned_abs() as usize > cutoff {
            return Err(format!("{lineno}: mode {n} outside cutoff {cutoff}"));
        }
        if !re.is_finite() || !im.is_finite() {
            return Err(format!("{lineno}: non-finite coefficient"));
        }
        if !seen.insert(n) {
            return Err(format!("{lineno}: mode {n} listed twice"));
        }
        a.set(n, Complex64::new(re, im));
    }
    Ok(a)
}
