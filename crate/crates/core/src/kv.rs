//! Line handling shared by the flat `key = value` file formats.

use crate::error::{Error, Result};

/// Non-blank lines with `#` comments removed, numbered from 1.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Splits `key = value`; the key is lower-cased.
pub(crate) fn split(line: &str, line_no: usize) -> Result<(String, &str)> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| Error::parse(line_no, "expected `key = value`"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::parse(line_no, "empty key"));
    }
    Ok((key.to_ascii_lowercase(), value.trim()))
}

/// Parses a float, accepting `inf`/`infinity`; rejects NaN.
pub(crate) fn number(value: &str, key: &str, line_no: usize) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::parse(line_no, format!("`{key}` expects a number, got `{value}`")))?;
    if v.is_nan() {
        return Err(Error::parse(line_no, format!("`{key}` is NaN")));
    }
    Ok(v)
}
