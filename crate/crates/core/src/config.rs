//! Flat key-value configuration documents.
//!
//! Ground layouts and delivery scenarios share one grammar: UTF-8 text, one
//! `key = value` per line, `#` starts a comment, blank lines ignored. Keys
//! are dotted lowercase identifiers (`ap.<id>`, `fielder.<id>`); values are
//! decimal numbers, comma-separated number tuples, or bare strings.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// One `key = value` entry with its 1-based source line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn number(&self) -> Result<f64, ParseError> {
        parse_number(self.line, &self.value)
    }

    /// Parses the value as exactly `n` comma-separated numbers.
    pub fn tuple(&self, n: usize) -> Result<Vec<f64>, ParseError> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if parts.len() != n {
            return Err(ParseError::new(
                self.line,
                format!(
                    "key `{}` expects {n} comma-separated numbers, got {}",
                    self.key,
                    parts.len()
                ),
            ));
        }
        parts
            .iter()
            .map(|p| parse_number(self.line, p))
            .collect()
    }
}

fn parse_number(line: usize, text: &str) -> Result<f64, ParseError> {
    let v: f64 = text
        .parse()
        .map_err(|_| ParseError::new(line, format!("`{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(ParseError::new(line, format!("`{text}` is not finite")));
    }
    Ok(v)
}

/// Splits a document into entries. Duplicate keys are rejected so that a
/// document has one unambiguous meaning.
pub fn parse_document(text: &str) -> Result<Vec<Entry>, ParseError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError::new(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ParseError::new(line, "empty key"));
        }
        if value.is_empty() {
            return Err(ParseError::new(line, format!("key `{key}` has no value")));
        }
        if !key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        {
            return Err(ParseError::new(line, format!("invalid key `{key}`")));
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ParseError::new(line, format!("duplicate key `{key}`")));
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(entries)
}

/// Formats a float so that re-parsing recovers the identical bits
/// (Rust's default shortest round-trip representation).
pub fn format_number(v: f64) -> String {
    format!("{v}")
}
