//! Run manifests, failure classes and the CSV/JSON writers shared by the subcommands.

use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};
use tricomi_core::manifest::config_hash;

pub const SCHEMA_VERSION: u32 = 1;

/// How a subcommand failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs that violate a precondition (exit 2).
    Usage(String),
    /// The run finished but a check did not pass (exit 1).
    Check(String),
    /// Anything else that stopped the run (exit 1).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage: {msg}"),
            Failure::Check(msg) => write!(f, "check failed: {msg}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

pub fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Provenance attached to every output. Only the two timestamps vary
/// between identical invocations.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: &'static str,
    pub config: Value,
    pub config_hash: String,
    pub tool_version: &'static str,
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    pub fn start<C: Serialize>(subcommand: &'static str, config: &C) -> Self {
        let config = serde_json::to_value(config).unwrap_or(Value::Null);
        RunManifest {
            schema_version: SCHEMA_VERSION,
            subcommand,
            config_hash: config_hash(&config),
            config,
            tool_version: env!("CARGO_PKG_VERSION"),
            started_unix: unix_now(),
            finished_unix: 0,
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix = unix_now();
    }

    /// `{schema_version, manifest, <key>: payload}`.
    pub fn wrap<P: Serialize>(&mut self, key: &str, payload: &P) -> Result<Value, Failure> {
        self.finish();
        Ok(json!({
            "schema_version": SCHEMA_VERSION,
            "manifest": self,
            key: serde_json::to_value(payload)?,
        }))
    }
}

/// Shortest round-trip decimal, in exponent form away from moderate magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Writes a CSV table to `path`, or to standard output, with a trailing
/// `config_hash` column.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>], hash: &str) -> Outcome {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut head: Vec<&str> = header.to_vec();
    head.push("config_hash");
    w.write_record(&head)?;
    for row in rows {
        let mut row = row.clone();
        row.push(hash.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline, to `path` or standard output.
pub fn write_json(path: Option<&Path>, value: &Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// A list of scales: `lo:hi:step` (inclusive) or comma-separated values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number in grid '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
            if !(step > 0.0 && hi >= lo) {
                return Err(format!("grid '{spec}' needs hi >= lo and a positive step"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| lo + k as f64 * step).collect()
        }
        [list] => list.split(',').map(parse).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid '{spec}' is neither lo:hi:step nor a comma list")),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(format!("grid '{spec}' is empty or not finite"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1.5:2.5:0.5").unwrap(), vec![1.5, 2.0, 2.5]);
        assert_eq!(parse_grid("2, 3,4.5").unwrap(), vec![2.0, 3.0, 4.5]);
        assert_eq!(parse_grid("1:2:0.1").unwrap().len(), 11);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:0.5").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.5, -2.25e-17, 1e300, 123456.789, 1.0 / 3.0, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(2.5e-7), "2.5e-7");
        assert_eq!(num(0.25), "0.25");
    }

    #[test]
    fn manifest_hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"x": 1, "y": {"b": 2, "a": 3}}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"y": {"a": 3, "b": 2}, "x": 1}"#).unwrap();
        assert_eq!(RunManifest::start("t", &a).config_hash, RunManifest::start("t", &b).config_hash);
    }
}
