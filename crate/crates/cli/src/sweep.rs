//! The `sweep` subcommand: run the construction over a grid of parameter
//! values crossed with seeds and emit one long-format CSV.
//!
//! Each cell is an independent pipeline run; cells are parallelized and the
//! rows are still written in grid order, so the output is byte-stable no
//! matter how many threads execute it. Extinction inside a cell is recorded
//! in the metrics, not treated as a failure.

use std::time::Instant;

use anyhow::Context;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::csvio::{fmt_f64, write_atomic, CsvBuilder};
use crate::manifest::Manifest;
use crate::pipeline::run_pipeline;
use crate::RunContext;

/// Metric names in row order for a depth-`K` ladder: survival depth, one
/// alive count per scale, the box-count slope of the survivor set, and the
/// deepest sink mass.
pub fn metric_names(depth: usize) -> Vec<String> {
    let mut names = vec!["survival_depth".to_string()];
    names.extend((1..=depth).map(|k| format!("alive_count_{k}")));
    names.push("box_count_slope".to_string());
    names.push("sink_mass".to_string());
    names
}

fn cell_metrics(cfg: &RunConfig, seed: u64) -> anyhow::Result<Vec<f64>> {
    let out = run_pipeline(cfg, seed)?;
    let depth = out.ladder.depth();
    let counts = out.levels.counts();
    let mut row = Vec::with_capacity(depth + 3);
    row.push(out.levels.survival_depth() as f64);
    row.extend(counts.iter().map(|&c| c as f64));
    let dim = cfg.dimension.unwrap_or_default();
    let slope = if out.survivor.is_empty() {
        0.0
    } else {
        let grid = rpslab_core::dimension::dyadic_eps_grid(dim.eps_from, dim.eps_to);
        rpslab_core::dimension::dimension_fit(&out.survivor, &grid)
            .slope
            .unwrap_or(0.0)
    };
    row.push(slope);
    let sink = out
        .measure
        .as_ref()
        .and_then(|m| m.levels.last())
        .map_or(f64::NAN, |lv| lv.sink.to_f64().unwrap_or(f64::NAN));
    row.push(sink);
    Ok(row)
}

pub fn run(cfg: &RunConfig, ctx: &RunContext) -> anyhow::Result<i32> {
    let sw = cfg
        .sweep
        .clone()
        .context("sweep subcommand needs a \"sweep\" section in the config")?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut manifest = Manifest::begin(ctx.command, cfg, ctx.seed, ctx.seed_source, &ctx.out_dir);
    manifest.write(&ctx.out_dir)?;
    let t0 = Instant::now();

    let cells: Vec<(f64, u64)> = sw
        .values
        .iter()
        .flat_map(|&v| sw.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let results: Vec<(f64, u64, Vec<f64>)> = ctx.pool.install(|| {
        cells
            .par_iter()
            .map(|&(value, seed)| {
                let cell = cfg.with_sweep_value(sw.variable, value)?;
                let metrics = cell_metrics(&cell, seed).with_context(|| {
                    format!("sweep cell {}={value} seed={seed}", sw.variable.name())
                })?;
                Ok((value, seed, metrics))
            })
            .collect::<anyhow::Result<_>>()
    })?;

    let names = metric_names(cfg.ladder.depth);
    let mut b = CsvBuilder::new(&["variable", "value", "seed", "metric", "result"]);
    for (value, seed, metrics) in &results {
        assert_eq!(metrics.len(), names.len());
        for (name, &m) in names.iter().zip(metrics) {
            b.row([
                sw.variable.name().to_string(),
                fmt_f64(*value),
                seed.to_string(),
                name.clone(),
                fmt_f64(m),
            ]);
        }
    }
    let csv = b.finish();
    manifest.add_output("sweep.csv", csv.as_bytes());
    write_atomic(&ctx.out_dir.join("sweep.csv"), csv.as_bytes())?;

    manifest.exit_code = Some(0);
    manifest.wall_time_ms = Some(t0.elapsed().as_millis() as u64);
    manifest.complete = true;
    manifest.write(&ctx.out_dir)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{SweepConfig, SweepVariable};
    use crate::csvio::parse_rows;
    use crate::manifest::SeedSource;

    fn ctx(dir: &std::path::Path, threads: usize) -> RunContext {
        RunContext {
            seed: 0,
            seed_source: SeedSource::Default,
            out_dir: dir.to_path_buf(),
            pool: rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap(),
            command: "sweep",
        }
    }

    fn small_sweep_config() -> RunConfig {
        let mut cfg: RunConfig = serde_json::from_str(
            r#"{
                "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4},
                           "beta_sub": 1.0, "beta_child": 1.0, "beta_widen": 0.5},
                "coefficients": {"model": "scaled_sqrt", "delta0": 0.1}
            }"#,
        )
        .unwrap();
        cfg.sweep = Some(SweepConfig {
            variable: SweepVariable::Delta0,
            values: vec![0.1, 0.4],
            seeds: vec![1, 2, 3],
        });
        cfg.validate().unwrap();
        cfg
    }

    #[test]
    fn row_count_is_values_times_seeds_times_metrics() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_sweep_config();
        assert_eq!(run(&cfg, &ctx(dir.path(), 1)).unwrap(), 0);
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        let rows = parse_rows(&text).unwrap();
        assert_eq!(rows.len(), 2 * 3 * (3 + 3));
        assert_eq!(rows[0][0], "delta0");
        assert_eq!(rows[0][3], "survival_depth");
        let slope_rows: Vec<_> = rows.iter().filter(|r| r[3] == "box_count_slope").collect();
        assert_eq!(slope_rows.len(), 6);
        let sink_rows: Vec<_> = rows.iter().filter(|r| r[3] == "sink_mass").collect();
        assert_eq!(sink_rows.len(), 6);
        assert_eq!(rows.len() % metric_names(3).len(), 0);
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let d1 = tempfile::tempdir().unwrap();
        let d4 = tempfile::tempdir().unwrap();
        let cfg = small_sweep_config();
        run(&cfg, &ctx(d1.path(), 1)).unwrap();
        run(&cfg, &ctx(d4.path(), 4)).unwrap();
        assert_eq!(
            std::fs::read(d1.path().join("sweep.csv")).unwrap(),
            std::fs::read(d4.path().join("sweep.csv")).unwrap()
        );
    }

    #[test]
    fn extinct_cells_report_metrics_instead_of_failing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_sweep_config();
        cfg.good.thresholds = rpslab_core::goodness::GoodMode::ConstantSup { level: 0.0 };
        assert_eq!(run(&cfg, &ctx(dir.path(), 1)).unwrap(), 0);
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        let rows = parse_rows(&text).unwrap();
        let depth_rows: Vec<_> = rows.iter().filter(|r| r[3] == "survival_depth").collect();
        assert!(depth_rows.iter().all(|r| r[4] == "1"));
        let slope_rows: Vec<_> = rows.iter().filter(|r| r[3] == "box_count_slope").collect();
        assert!(slope_rows.iter().all(|r| r[4] == "0"));
    }

    #[test]
    fn missing_sweep_section_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_sweep_config();
        cfg.sweep = None;
        assert!(run(&cfg, &ctx(dir.path(), 1)).is_err());
    }
}
