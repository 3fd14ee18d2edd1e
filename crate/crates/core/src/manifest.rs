//! Stable configuration fingerprints.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the JSON form of `value` with object keys sorted, so the
/// hash does not depend on field or key order.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let canonical = serde_json::to_value(value).map(|v| v.to_string()).unwrap_or_default();
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_does_not_matter() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": [1, 2], "c": {"y": 1, "x": 2}}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"c": {"x": 2, "y": 1}, "a": [1, 2], "b": 1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        let c: serde_json::Value = serde_json::from_str(r#"{"b": 2, "a": [1, 2], "c": {"y": 1, "x": 2}}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }
}
