//! The run manifest: one JSON record per run that makes the output tree
//! self-describing and re-runnable.
//!
//! Written twice: an incomplete stub as the first action of a run (so an
//! interrupted run is recognizable) and the full record at the end, both via
//! temp file + atomic rename. Re-running with the same config echo, seed,
//! and versions reproduces the same output hashes; `wall_time_ms` and
//! `out_dir` are the only fields that may differ between identical runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::csvio::write_atomic;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Env,
    Config,
    Default,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerScale {
    pub scale: usize,
    pub n: u64,
    pub alive: Option<u64>,
    pub healthy: Option<u64>,
    /// Exact sink mass after the push into this scale, as `p/q`.
    pub sink_mass: Option<String>,
    /// Interval-nesting margin of the transition out of this scale
    /// (must stay `<= 1`).
    pub nesting_lhs: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: Option<f64>,
    pub rms: f64,
    pub eps_from: u32,
    pub eps_to: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact_version: String,
    pub generator_version: u32,
    pub command: String,
    pub complete: bool,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub out_dir: String,
    /// The loaded configuration with every default materialized.
    pub config: RunConfig,
    pub start_scale: Option<usize>,
    pub end_scale: Option<usize>,
    pub extinction_scale: Option<usize>,
    pub nesting_ok: Option<bool>,
    /// Worst log-gap of atom mass against the per-interval ceiling
    /// (negative means inside the bound).
    pub frostman_worst_gap: Option<f64>,
    pub dimension_fit: Option<FitSummary>,
    pub aggregate_verdict: Option<bool>,
    pub within_time_cap: Option<bool>,
    pub exit_code: Option<i32>,
    pub wall_time_ms: Option<u64>,
    pub per_scale: Vec<PerScale>,
    /// SHA-256 of every emitted file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn begin(
        command: &str,
        config: &RunConfig,
        seed: u64,
        seed_source: SeedSource,
        out_dir: &Path,
    ) -> Self {
        Self {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            generator_version: rpslab_core::GENERATOR_VERSION,
            command: command.to_string(),
            complete: false,
            seed,
            seed_source,
            out_dir: out_dir.display().to_string(),
            config: config.clone(),
            start_scale: None,
            end_scale: None,
            extinction_scale: None,
            nesting_ok: None,
            frostman_worst_gap: None,
            dimension_fit: None,
            aggregate_verdict: None,
            within_time_cap: None,
            exit_code: None,
            wall_time_ms: None,
            per_scale: Vec::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn path(out_dir: &Path) -> PathBuf {
        out_dir.join(MANIFEST_NAME)
    }

    pub fn write(&self, out_dir: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&Self::path(out_dir), text.as_bytes())?;
        Ok(())
    }

    /// Records one output file's content hash.
    pub fn add_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs
            .insert(name.to_string(), rpslab_core::hashutil::sha256_hex(bytes));
    }
}
