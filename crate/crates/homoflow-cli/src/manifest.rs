//! Run manifests: a JSON record of everything needed to reproduce a run.
//! Parameters are stored as the fully resolved strings, so `rerun` feeds the
//! exact same text through the exact same parsers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    /// Fully resolved parameter map (defaults, config file, and command line
    /// already merged).
    pub params: BTreeMap<String, String>,
    /// Seed extracted from params where the subcommand has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    /// CSV files written, relative to the output directory.
    pub artifacts: Vec<String>,
    /// Worker threads used; informational only, results do not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Manifest {
    pub fn versions() -> BTreeMap<String, String> {
        let mut v = BTreeMap::new();
        v.insert("homoflow".to_string(), homoflow::VERSION.to_string());
        v.insert(
            "homoflow-cli".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        v
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join("run_manifest.json");
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("manifest serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: not a run manifest: {e}", path.display())))
    }
}
