//! Command-line front end for the multi-scale construction library: run the
//! branching pipeline, the probabilistic diagnostics, parameter sweeps, and
//! box-counting fits from a single JSON config, with reproducible artifacts.

use std::path::PathBuf;

pub mod cli;
pub mod config;
pub mod construct;
pub mod csvio;
pub mod diagnose;
pub mod manifest;
pub mod pipeline;
pub mod sweep;

use manifest::SeedSource;

/// Everything a subcommand needs beyond its config: the resolved seed and
/// where it came from, the output directory, and the thread pool all
/// parallel work must run inside.
pub struct RunContext {
    pub seed: u64,
    pub seed_source: SeedSource,
    pub out_dir: PathBuf,
    pub pool: rayon::ThreadPool,
    pub command: &'static str,
}
