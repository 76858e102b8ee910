//! Reproducible run manifests.
//!
//! Every command writes a `manifest.json` capturing the effective
//! configuration, seed, tool version and produced files. Re-running the same
//! command with `--config manifest.json` reproduces the outputs
//! byte-for-byte (the manifest itself carries wall-clock timestamps and is
//! metadata, not an output).

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub base_seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub started: String,
    pub finished: String,
}

impl RunManifest {
    pub fn write<C: Serialize>(
        out_dir: &Path,
        command: &str,
        config: &C,
        base_seed: u64,
        outputs: &[String],
        started: chrono::DateTime<chrono::Utc>,
    ) -> Result<std::path::PathBuf> {
        let manifest = RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            base_seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: outputs.to_vec(),
            started: started.to_rfc3339(),
            finished: chrono::Utc::now().to_rfc3339(),
        };
        let path = out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}

/// Loads a command config from a JSON file. The file may be either a bare
/// config object or a previously written manifest (in which case its
/// `config` field is used).
pub fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let config_value = match value.get("config") {
        Some(inner) if value.get("command").is_some() => inner.clone(),
        _ => value,
    };
    Ok(serde_json::from_value(config_value)?)
}
