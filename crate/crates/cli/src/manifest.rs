//! Per-stage manifests: content hashes of inputs and outputs plus the
//! effective configuration. A stage whose manifest still matches is not
//! recomputed.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub tool_version: String,
    pub config: Value,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub timings_ms: BTreeMap<String, f64>,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn hashes(paths: &[PathBuf]) -> io::Result<Vec<FileHash>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileHash {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// `<output>.manifest.json` next to the stage's primary output.
pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output
        .file_name()
        .unwrap_or_default()
        .to_os_string();
    name.push(".manifest.json");
    primary_output.with_file_name(name)
}

/// A stage run: checks for an up-to-date manifest before, records one after.
pub struct StageRun {
    stage: String,
    config: Value,
    outputs: Vec<PathBuf>,
    input_hashes: Vec<FileHash>,
    timings: BTreeMap<String, f64>,
}

impl StageRun {
    pub fn new(
        stage: &str,
        config: Value,
        inputs: Vec<PathBuf>,
        outputs: Vec<PathBuf>,
    ) -> io::Result<Self> {
        let input_hashes = hashes(&inputs)?;
        Ok(StageRun {
            stage: stage.to_string(),
            config,
            outputs,
            input_hashes,
            timings: BTreeMap::new(),
        })
    }

    /// True if the last run had the same inputs and configuration and its
    /// outputs are unchanged on disk.
    pub fn up_to_date(&self) -> bool {
        let Some(primary) = self.outputs.first() else {
            return false;
        };
        let Ok(text) = fs::read_to_string(manifest_path(primary)) else {
            return false;
        };
        let Ok(old) = serde_json::from_str::<Manifest>(&text) else {
            return false;
        };
        old.stage == self.stage
            && old.tool_version == env!("CARGO_PKG_VERSION")
            && old.config == self.config
            && old.inputs == self.input_hashes
            && hashes(&self.outputs).is_ok_and(|h| h == old.outputs)
    }

    pub fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let started = std::time::Instant::now();
        let out = f();
        self.timings
            .insert(step.to_string(), started.elapsed().as_secs_f64() * 1000.0);
        out
    }

    pub fn finish(self) -> io::Result<()> {
        let Some(primary) = self.outputs.first() else {
            return Ok(());
        };
        let manifest = Manifest {
            stage: self.stage,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config,
            inputs: self.input_hashes,
            outputs: hashes(&self.outputs)?,
            timings_ms: self.timings,
        };
        write_atomic(
            &manifest_path(primary),
            serde_json::to_string_pretty(&manifest)?.as_bytes(),
        )
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    let tmp = path.with_file_name(name);
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}
