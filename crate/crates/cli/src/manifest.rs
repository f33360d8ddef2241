use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub elapsed_ms: u128,
}

/// SHA-256 of the canonical JSON form of the effective settings.
pub fn config_hash<T: Serialize>(settings: &T) -> String {
    let bytes = serde_json::to_vec(settings).expect("settings serialize");
    hex::encode(Sha256::digest(&bytes))
}

pub fn manifest_path(output: &Path) -> PathBuf {
    if output.is_dir() {
        return output.join("manifest.json");
    }
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

impl RunManifest {
    pub fn new<T: Serialize>(
        command: &str,
        inputs: &[&Path],
        outputs: &[PathBuf],
        settings: &T,
        seed: Option<u64>,
        elapsed: Duration,
    ) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            config_hash: config_hash(settings),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: elapsed.as_millis(),
        }
    }

    pub fn write_beside(&self, output: &Path) -> std::io::Result<PathBuf> {
        let path = manifest_path(output);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&serde_json::json!({"seed": 1, "density": 200.0}));
        assert_eq!(a, config_hash(&serde_json::json!({"seed": 1, "density": 200.0})));
        assert_ne!(a, config_hash(&serde_json::json!({"seed": 2, "density": 200.0})));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(
            manifest_path(Path::new("/tmp/none/plan.json")),
            PathBuf::from("/tmp/none/plan.json.manifest.json")
        );
    }
}
