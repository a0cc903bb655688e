//! Presentation helpers shared by the report writers.

use serde::Serialize;

/// Rounds to six significant digits. Non-finite values pass through.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Serializes with object keys sorted and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json::Value keeps maps in a BTreeMap, which sorts keys
    let value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}
