//! Flat key=value experiment configuration.
//!
//! A config file holds one `key=value` pair per line; `#` starts a comment.
//! Command-line flags override file values. Writing and re-reading a config
//! reproduces it exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// An ordered set of string key/value pairs with typed accessors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: {raw:?}", lineno + 1);
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => Ok(Some(
                s.parse().with_context(|| format!("config key {key}={s} is not a number"))?,
            )),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => Ok(Some(
                s.parse()
                    .with_context(|| format!("config key {key}={s} is not an integer"))?,
            )),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut c = Config::default();
        c.set("p", 2.0);
        c.set("q", 4.0);
        c.set("geometry", "interval");
        c.set("seed", 42);
        let text = c.to_text();
        let back = Config::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(back.get_f64("p").unwrap(), Some(2.0));
        assert_eq!(back.get("geometry"), Some("interval"));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let c = Config::from_str("# experiment\n\np = 2\nq=4\n").unwrap();
        assert_eq!(c.get_f64("p").unwrap(), Some(2.0));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::from_str("p 2").is_err());
        assert!(Config::from_str("p=x").unwrap().get_f64("p").is_err());
    }
}
