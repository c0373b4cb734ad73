//! Flat `key = value` text, shared by run configs and calibration files.
//!
//! One entry per line; blank lines and lines starting with `#` are skipped.
//! Keys may contain dots but there is no nesting.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A configuration problem, located by line and key when possible.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl ConfigError {
    pub fn key(key: &str, message: impl Into<String>) -> Self {
        ConfigError { line: None, key: Some(key.to_string()), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError { line: Some(self.line), key: Some(self.key.clone()), message: message.into() }
    }

    pub fn parse<T: FromStr>(&self) -> Result<T, ConfigError> {
        self.value.parse().map_err(|_| self.error(format!("cannot parse {:?}", self.value)))
    }

    pub fn flag(&self) -> Result<bool, ConfigError> {
        match self.value.as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(self.error(format!("expected true or false, got {v:?}"))),
        }
    }

    /// Comma-separated reals, exactly `n` of them.
    pub fn reals(&self, n: usize) -> Result<Vec<f64>, ConfigError> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if parts.len() != n {
            return Err(self.error(format!("expected {n} comma-separated values, got {}", parts.len())));
        }
        parts
            .iter()
            .map(|p| match p.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(self.error(format!("cannot parse {p:?} as a number"))),
            })
            .collect()
    }
}

/// Splits `text` into entries. Malformed lines and repeated keys are errors.
pub fn parse(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError { line: Some(line), key: None, message: "expected `key = value`".into() });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError { line: Some(line), key: None, message: "empty key".into() });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(ConfigError {
                line: Some(line),
                key: Some(key.to_string()),
                message: format!("duplicate key, first set on line {}", prev.line),
            });
        }
        out.push(Entry { line, key: key.to_string(), value: value.trim().to_string() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_and_errors() {
        let e = parse("# c\n\na = 1\n b.c=x y \n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[1].line, e[1].key.as_str(), e[1].value.as_str()), (4, "b.c", "x y"));
        let err = parse("a=1\nb\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        let err = parse("a=1\na=2\n").unwrap_err();
        assert_eq!((err.line, err.key.as_deref()), (Some(2), Some("a")));
    }

    #[test]
    fn reals_check_arity() {
        let e = &parse("w = 0.5, 0.6").unwrap()[0];
        assert!(e.reals(3).unwrap_err().to_string().contains("key `w`"));
        assert_eq!(e.reals(2).unwrap(), vec![0.5, 0.6]);
    }
}
