//! Flat `key = value` configuration files.
//!
//! Keys are the long flag names without the leading dashes (`alpha`,
//! `escape-radius`, ...); underscores are accepted in place of dashes.
//! `#` starts a comment, blank lines are skipped and values may be wrapped
//! in double quotes.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Usage(format!(
                "config line {line_no}: expected 'key = value'"
            )));
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(Error::Usage(format!(
                "config line {line_no}: invalid key '{key}'"
            )));
        }
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        if value.is_empty() {
            return Err(Error::Usage(format!(
                "config line {line_no}: empty value for '{key}'"
            )));
        }
        out.push(ConfigEntry {
            key,
            value: value.to_string(),
            line: line_no,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_comments() {
        let text =
            "# period-13 case\nalpha = 89+55i\nbeta=\"32+90i\"  # trailing\n\nescape_radius = 1e6\n";
        let entries = parse_config(text).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].key, "alpha");
        assert_eq!(entries[0].value, "89+55i");
        assert_eq!(entries[1].value, "32+90i");
        assert_eq!(entries[2].key, "escape-radius");
        assert_eq!(entries[2].line, 5);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config("alpha 1+1i").is_err());
        assert!(parse_config("= 3").is_err());
        assert!(parse_config("al pha = 3").is_err());
        assert!(parse_config("alpha =").is_err());
        assert!(parse_config("alpha = \"\"").is_err());
    }
}
