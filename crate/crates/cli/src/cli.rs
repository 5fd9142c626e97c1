//! Argument parsing and dispatch. Seed resolution order: `--seed` flag,
//! then the `RPSLAB_SEED` environment variable, then the config file, then
//! zero. Output directory: `--out` flag, then the config, then `rpslab_out`.

use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::manifest::SeedSource;
use crate::{construct, diagnose, sweep, RunContext};

pub const SEED_ENV: &str = "RPSLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "rpslab", version, about = "Random power series laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect the scale ladder implied by a config.
    Ladder {
        #[command(subcommand)]
        action: LadderAction,
    },
    /// Run the full construction and write its artifacts.
    Construct(RunArgs),
    /// Run the selected probabilistic checks and write verdicts.
    Diagnose(RunArgs),
    /// Run the construction over a parameter grid crossed with seeds.
    Sweep(RunArgs),
    /// Run the construction plus box counting of the survivor set.
    Dimension(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum LadderAction {
    /// Print the resolved scales as a table.
    Print {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the config and exit.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn parse_seed(text: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        text.parse()
    };
    parsed.map_err(|e| format!("invalid seed {text:?}: {e}"))
}

fn resolve_context(
    args: &RunArgs,
    cfg: &RunConfig,
    command: &'static str,
) -> anyhow::Result<RunContext> {
    let (seed, seed_source) = if let Some(s) = args.seed {
        (s, SeedSource::Flag)
    } else if let Ok(text) = std::env::var(SEED_ENV) {
        let s = parse_seed(&text)
            .map_err(anyhow::Error::msg)
            .with_context(|| format!("parsing {SEED_ENV}"))?;
        (s, SeedSource::Env)
    } else if let Some(s) = cfg.seed {
        (s, SeedSource::Config)
    } else {
        (0, SeedSource::Default)
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("rpslab_out"));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    Ok(RunContext {
        seed,
        seed_source,
        out_dir,
        pool,
        command,
    })
}

fn ladder_table(cfg: &RunConfig) -> anyhow::Result<String> {
    let ladder = rpslab_core::ladder::build_ladder(&cfg.ladder, &cfg.coefficients)?;
    let mut out = String::from("scale\tN\tM\tdelta\n");
    for k in 1..=ladder.depth() {
        let m = if k >= 2 {
            ladder.m_at(k).to_string()
        } else {
            "-".to_string()
        };
        out.push_str(&format!(
            "{k}\t{}\t{m}\t{}\n",
            ladder.n_at(k),
            crate::csvio::fmt_f64(ladder.delta_at(k))
        ));
    }
    Ok(out)
}

fn run_inner(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Ladder { action } => {
            let (config, print) = match &action {
                LadderAction::Print { config } => (config, true),
                LadderAction::Validate { config } => (config, false),
            };
            let cfg = RunConfig::load(config)?;
            let ladder = rpslab_core::ladder::build_ladder(&cfg.ladder, &cfg.coefficients)?;
            if print {
                print!("{}", ladder_table(&cfg)?);
            } else {
                println!("ok");
            }
            for w in ladder.warnings() {
                eprintln!("warning: {w}");
            }
            Ok(0)
        }
        Command::Construct(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let ctx = resolve_context(&args, &cfg, "construct")?;
            construct::run(&cfg, &ctx)
        }
        Command::Diagnose(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let ctx = resolve_context(&args, &cfg, "diagnose")?;
            diagnose::run(&cfg, &ctx)
        }
        Command::Sweep(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let ctx = resolve_context(&args, &cfg, "sweep")?;
            sweep::run(&cfg, &ctx)
        }
        Command::Dimension(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let ctx = resolve_context(&args, &cfg, "dimension")?;
            construct::run_with_fit(&cfg, &ctx)
        }
    }
}

/// Dispatch a parsed command line; errors print to stderr and become exit
/// code 1, domain outcomes keep their own codes.
pub fn run(cli: Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
