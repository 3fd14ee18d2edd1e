//! Sweep configuration files: JSON, or `key = value` lines with dotted keys
//! (`grid.n = 2048`, `epsilons = 0.8, 0.4, 0.2`). File values override the
//! defaults; keys the configuration does not have are rejected.

use serde_json::{Map, Value};
use tricomi_core::lifespan::SweepConfig;

fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    if raw.contains(',') {
        return Value::Array(raw.split(',').map(parse_value).collect());
    }
    Value::String(raw.to_string())
}

fn parse_key_values(text: &str) -> Result<Value, String> {
    let mut root = Map::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
        let path: Vec<&str> = key.trim().split('.').collect();
        let mut node = &mut root;
        for part in &path[..path.len() - 1] {
            node = node
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .ok_or_else(|| format!("line {}: '{part}' is both a value and a section", lineno + 1))?;
        }
        node.insert(path[path.len() - 1].to_string(), parse_value(value));
    }
    Ok(Value::Object(root))
}

/// Overlays `patch` onto `base`, refusing keys `base` lacks.
fn merge(base: &mut Value, patch: Value, at: &str) -> Result<(), String> {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                let here = if at.is_empty() { k.clone() } else { format!("{at}.{k}") };
                let slot = b.get_mut(&k).ok_or_else(|| format!("unknown configuration key '{here}'"))?;
                merge(slot, v, &here)?;
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

pub fn load_sweep_config(text: &str) -> Result<SweepConfig, String> {
    let patch = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?
    } else {
        parse_key_values(text)?
    };
    let mut base = serde_json::to_value(SweepConfig::default()).map_err(|e| e.to_string())?;
    merge(&mut base, patch, "")?;
    serde_json::from_value(base).map_err(|e| format!("config does not describe a sweep: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_override_defaults() {
        let cfg =
            load_sweep_config("# pinned\ngrid.n = 2048\nsim.t_max = 12\nepsilons = 0.8, 0.4, 0.2\nparallelism = 2\n")
                .unwrap();
        assert_eq!(cfg.grid.n, 2048);
        assert_eq!(cfg.sim.t_max, 12.0);
        assert_eq!(cfg.sim.p, 2.0);
        assert_eq!(cfg.epsilons, vec![0.8, 0.4, 0.2]);
        assert_eq!(cfg.parallelism, 2);
    }

    #[test]
    fn json_and_key_values_agree() {
        let a = load_sweep_config(r#"{"grid": {"half_width": 150}, "refine": true}"#).unwrap();
        let b = load_sweep_config("grid.half_width = 150\nrefine = true").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(load_sweep_config("grid.size = 10").unwrap_err().contains("grid.size"));
        assert!(load_sweep_config("nonsense").is_err());
        assert!(load_sweep_config("grid.n = many").is_err());
    }
}
