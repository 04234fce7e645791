//! Run manifests.
//!
//! Every run that writes an artifact also writes `<out>.manifest.json`
//! recording the parsed command line, input digests, and the seed, so
//! `perstat replay --manifest <path>` can re-execute the run and verify
//! the outputs are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Everything needed to reproduce a run bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Always `"perstat"`.
    pub tool: String,
    /// Crate version that produced the artifact.
    pub version: String,
    /// Deterministic seeding scheme identifier.
    pub rng_scheme: String,
    /// Subcommand name.
    pub subcommand: String,
    /// The parsed command line; `replay` re-dispatches this verbatim.
    pub params: serde_json::Value,
    /// Values the run resolved from defaults and data (expanded scale
    /// grids, column names, sample counts).
    pub resolved: serde_json::Value,
    /// SHA-256 content digest per input file.
    pub inputs: BTreeMap<String, String>,
    /// Master seed, for randomized subcommands only.
    pub seed: Option<u64>,
    /// Artifacts written, in order; the first is the primary output.
    pub outputs: Vec<String>,
}

/// Manifest path convention: the primary output path plus a suffix.
pub fn manifest_path(primary_out: &Path) -> PathBuf {
    let mut name = primary_out
        .file_name()
        .map(std::ffi::OsStr::to_os_string)
        .unwrap_or_default();
    name.push(".manifest.json");
    primary_out.with_file_name(name)
}

/// Writes the manifest next to the primary output.
pub fn write(manifest: &RunManifest, primary_out: &Path) -> Result<PathBuf> {
    let path = manifest_path(primary_out);
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write manifest {}", path.display()))?;
    Ok(path)
}

/// Loads and parses a manifest.
pub fn load(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{}: not a valid run manifest", path.display()))
}
