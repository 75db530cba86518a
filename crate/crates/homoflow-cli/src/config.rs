//! Plain-text key=value parameter handling: file parsing, positional
//! overrides, typed access, and the serialization used by run manifests.
//!
//! A parameter set is an ordered string map. Resolution order is defaults,
//! then config file, then command line pairs; later sources win. Values stay
//! verbatim strings until a command asks for a typed view, so serializing and
//! reparsing a set reproduces it exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    pub fn from_defaults(defaults: &[(&str, &str)]) -> Self {
        let map = defaults
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Params { map }
    }

    /// Parse "key = value" lines. Blank lines and #-comments are skipped;
    /// inline comments are not supported so values may contain '#'.
    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected key=value, got {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
            }
            if map
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
        }
        Ok(Params { map })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_text(&text)
    }

    /// One "key = value" line per entry, sorted by key.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.map {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }

    /// Overlay other on top of self.
    pub fn merge(&mut self, other: &Params) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    /// Apply positional "key=value" arguments.
    pub fn apply_pairs(&mut self, pairs: &[String]) -> Result<(), CliError> {
        for pair in pairs {
            let Some((key, value)) = pair.split_once('=') else {
                return Err(CliError::Config(format!(
                    "expected key=value argument, got {pair:?}"
                )));
            };
            self.map
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    /// Reject keys outside the subcommand's vocabulary so typos fail loudly.
    pub fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !known.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown parameter {key:?} (known: {})",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn raw(&self, key: &str) -> Result<&str, CliError> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Config(format!("missing required parameter {key:?}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| CliError::Config(format!("parameter {key:?}: not a number: {raw:?}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| CliError::Config(format!("parameter {key:?}: not an integer: {raw:?}")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| CliError::Config(format!("parameter {key:?}: not an integer: {raw:?}")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::Config(format!(
                "parameter {key:?}: expected true/false, got {other:?}"
            ))),
        }
    }

    /// Comma or whitespace separated list of numbers.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.raw(key)?;
        let items: Vec<f64> = raw
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| {
                CliError::Config(format!("parameter {key:?}: not a number list: {raw:?}"))
            })?;
        if items.is_empty() {
            return Err(CliError::Config(format!("parameter {key:?}: empty list")));
        }
        Ok(items)
    }

    /// Nine numbers, row major.
    pub fn matrix3(&self, key: &str) -> Result<nalgebra::Matrix3<f64>, CliError> {
        let items = self.f64_list(key)?;
        if items.len() != 9 {
            return Err(CliError::Config(format!(
                "parameter {key:?}: a 3x3 matrix needs 9 numbers (row major), got {}",
                items.len()
            )));
        }
        Ok(nalgebra::Matrix3::from_row_slice(&items))
    }
}
