use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Record of one invocation. Everything except `started_at_unix` is a
/// function of the inputs and the tool version.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: &'static str,
    /// SHA-256 of every file read, keyed by path.
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub exit_code: i32,
    pub started_at_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            parameters,
            version: env!("CARGO_PKG_VERSION"),
            input_digests: BTreeMap::new(),
            outputs: Vec::new(),
            exit_code: 0,
            started_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest: String = Sha256::digest(bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.input_digests
            .insert(path.display().to_string(), digest);
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Default manifest location for a primary output path.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}
