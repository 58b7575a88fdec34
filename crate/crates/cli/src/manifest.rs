//! Reproducibility manifests written next to every output file.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Everything needed to regenerate an output bit-exactly: the command,
/// its arguments, the resolved config, and the seed.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config_profile: String,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config_profile: &str) -> Self {
        Self {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config_profile: config_profile.to_string(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: 0.0,
        }
    }

    /// Writes `<output>.manifest.json` beside the primary output.
    pub fn write_beside(&mut self, output: &Path, elapsed: Duration) -> anyhow::Result<()> {
        self.duration_seconds = elapsed.as_secs_f64();
        let mut path = output.as_os_str().to_owned();
        path.push(".manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
