use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xscale_core::AggregationConfig;

use crate::error::CliError;

/// Everything needed to rerun one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<AggregationConfig>,
    /// Chained passes of `config.scale`.
    pub passes: Option<u32>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: u64,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// `<path>.<suffix>`, keeping the original extension.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Writes one manifest per line.
pub fn write_jsonl(manifests: &[RunManifest], path: &Path) -> Result<(), CliError> {
    let mut out = Vec::new();
    for m in manifests {
        serde_json::to_writer(&mut out, m).expect("manifest serializes");
        out.write_all(b"\n")?;
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
