//! Helpers for the line-oriented `key=value` headers.

use std::str::FromStr;

use crate::error::{LabError, Result};

/// Splits `a=1 b=2` into pairs.
pub fn header_pairs(line: &str) -> Result<Vec<(String, String)>> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| LabError::Parse(format!("expected key=value, got {tok}")))
        })
        .collect()
}

/// Looks up and parses one header field.
pub fn field<T: FromStr>(pairs: &[(String, String)], key: &str) -> Result<T> {
    let raw = pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| LabError::Parse(format!("missing header field {key}")))?;
    raw.parse().map_err(|_| LabError::Parse(format!("bad value for {key}: {raw}")))
}
