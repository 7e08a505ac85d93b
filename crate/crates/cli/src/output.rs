use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files written by one run. On failure everything written so far is removed.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    created_dirs: Vec<PathBuf>,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        let mut created_dirs = Vec::new();
        let mut missing = Vec::new();
        let mut p = dir.to_path_buf();
        while !p.as_os_str().is_empty() && !p.exists() {
            missing.push(p.clone());
            if !p.pop() {
                break;
            }
        }
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        created_dirs.extend(missing);
        Ok(Outputs { dir: dir.to_path_buf(), created_dirs, files: Vec::new() })
    }

    /// Writes `name` (relative, may contain one subdirectory) under the output directory.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            if !parent.exists() {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
                self.created_dirs.push(parent.to_path_buf());
            }
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    pub fn files(&self) -> &[(String, String)] {
        &self.files
    }

    /// Deletes the files of this run and any directories it created.
    pub fn discard(&mut self) {
        for (name, _) in self.files.drain(..) {
            let _ = std::fs::remove_file(self.dir.join(name));
        }
        // Deepest first; only empty directories go.
        self.created_dirs.sort_by_key(|d| std::cmp::Reverse(d.components().count()));
        for d in self.created_dirs.drain(..) {
            let _ = std::fs::remove_dir(d);
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

/// Everything needed to repeat a run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Option<String>,
    pub config_sha256: Option<String>,
    pub output_dir: String,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub dt_override: Option<f64>,
    pub cells_override: Option<usize>,
    /// Hashes of the coefficient sets in effect.
    pub coefficients: Vec<FileEntry>,
    pub status: String,
    pub condition: Option<String>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}
