//! Sample files: one decimal number per line, UTF-8, LF or CRLF. Blank
//! lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use crate::error::CliError;

pub fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_samples(&text)
}

pub fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::input(format!("line {line_no}: cannot parse '{line}' as a number")))?;
        if !v.is_finite() {
            return Err(CliError::input(format!("line {line_no}: value {line} is not finite")));
        }
        if v <= 0.0 {
            return Err(CliError::input(format!(
                "line {line_no}: value {line} is not positive; samples must be > 0"
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::input("sample file contains no values"));
    }
    Ok(values)
}
