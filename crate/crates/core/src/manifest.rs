//! Provenance record written next to every command's outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::formats::{read_file, write_json};
use crate::Result;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Relative to the manifest's directory when the file lies below it.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Only recorded on request so repeated runs stay byte-identical.
    pub wall_time_seconds: Option<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn display_path(path: &Path, base: &Path) -> String {
    path.strip_prefix(base)
        .map(Path::to_path_buf)
        .unwrap_or_else(|_| path.to_path_buf())
        .display()
        .to_string()
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_seconds: None,
        }
    }

    /// Writes the manifest to `path` after hashing the listed files.
    pub fn write(mut self, path: &Path, inputs: &[PathBuf], outputs: &[PathBuf]) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        let digest = |p: &PathBuf| -> Result<FileDigest> {
            let bytes = read_file(p)?;
            Ok(FileDigest {
                path: display_path(p, base),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            })
        };
        self.inputs = inputs.iter().map(digest).collect::<Result<_>>()?;
        self.outputs = outputs.iter().map(digest).collect::<Result<_>>()?;
        write_json(path, &self)?;
        Ok(self)
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let mut s = primary_output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
