use std::path::{Path, PathBuf};

use ldsp_core::io::sha256_hex;
use ldsp_core::{EdiConfig, EvalConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Settings read from `--config`. Every field is optional; command-line flags
/// override whatever is set here.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub plot_top_n: Option<usize>,
    pub edi: EdiConfig,
    pub eval: EvalConfig,
}

impl FileConfig {
    /// TOML unless the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|reason| CliError::Config { path: path.to_path_buf(), reason })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    /// File name only, so runs reading copies in different places agree.
    pub name: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        Self { name, sha256: sha256_hex(bytes) }
    }
}

/// `run-manifest.json`. The thread count and output directory are left out
/// on purpose: they do not change any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn output(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.outputs.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn write(mut self, dir: &Path) -> Result<PathBuf, CliError> {
        self.outputs.sort();
        let path = dir.join("run-manifest.json");
        ldsp_core::io::write_json(&path, &self)?;
        Ok(path)
    }
}
