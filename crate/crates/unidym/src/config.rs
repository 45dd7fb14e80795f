//! Flat key-value experiment configuration.
//!
//! The format is one `key = value` pair per line, with `#` starting a
//! comment and blank lines ignored.  Keys are namespaced per experiment
//! (`census.grid`, `sharpness.stages`, …).  Every getter takes a default so
//! an empty configuration always works; values that fail to parse or
//! violate a positivity requirement are usage errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};

/// A parsed flat key-value configuration.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    /// The empty configuration; every getter returns its default.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses a configuration from text.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!(
                    "config line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(HarnessError::Usage(format!(
                    "config line {}: empty key",
                    lineno + 1
                )));
            }
            // Later lines override earlier ones.
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    /// Reads and parses a configuration file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Io(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }

    /// Raw lookup.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// String value with a default.
    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    /// `f64` value with a default.
    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse::<f64>().map_err(|_| {
                HarnessError::Usage(format!("config key `{key}`: `{v}` is not a number"))
            }),
        }
    }

    /// Strictly positive finite `f64` with a default (tolerances, widths).
    pub fn pos_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(HarnessError::Usage(format!(
                "config key `{key}`: must be positive and finite, got {v}"
            )));
        }
        Ok(v)
    }

    /// `u64` value with a default.
    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse::<u64>().map_err(|_| {
                HarnessError::Usage(format!(
                    "config key `{key}`: `{v}` is not a non-negative integer"
                ))
            }),
        }
    }

    /// `usize` value with a default.
    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    /// Comma-separated list of `f64` with a default.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        HarnessError::Usage(format!(
                            "config key `{key}`: `{s}` is not a number"
                        ))
                    })
                })
                .collect(),
        }
    }

    /// All keys, sorted (BTreeMap order).
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Renders the configuration back to its text form, sorted by key.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
