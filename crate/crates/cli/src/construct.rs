//! The `construct` subcommand: run the full pipeline for one seed and
//! archive every stage as CSV plus the manifest.
//!
//! Emitted files: `scales.csv`, `alive.csv`, `children.csv`, `healthy.csv`,
//! `measure.csv`, `intervals.csv`, `survivor.csv`, and (for the `dimension`
//! subcommand) `boxcounts.csv`. Exit code 0 on a full-depth run, 2 when some
//! alive set empties out, 3 when the interval-nesting margin fails; partial
//! trees are still written.

use std::time::Instant;

use rpslab_core::branching::{count_window, prefix_counts};
use rpslab_core::dimension::{dimension_fit, dyadic_eps_grid};
use rpslab_core::measure::FrostmanMeasure;

use crate::config::{DimensionConfig, RunConfig};
use crate::csvio::{fmt_f64, write_atomic, CsvBuilder};
use crate::manifest::{FitSummary, Manifest, PerScale};
use crate::pipeline::{construct_exit_code, run_pipeline, PipelineOutput};
use crate::RunContext;

pub fn run(cfg: &RunConfig, ctx: &RunContext) -> anyhow::Result<i32> {
    run_inner(cfg, ctx, false)
}

pub fn run_with_fit(cfg: &RunConfig, ctx: &RunContext) -> anyhow::Result<i32> {
    run_inner(cfg, ctx, true)
}

fn run_inner(cfg: &RunConfig, ctx: &RunContext, with_fit: bool) -> anyhow::Result<i32> {
    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut manifest = Manifest::begin(ctx.command, cfg, ctx.seed, ctx.seed_source, &ctx.out_dir);
    manifest.write(&ctx.out_dir)?;
    let t0 = Instant::now();

    let out = ctx.pool.install(|| run_pipeline(cfg, ctx.seed))?;

    let emit = |manifest: &mut Manifest, name: &str, text: String| -> anyhow::Result<()> {
        manifest.add_output(name, text.as_bytes());
        write_atomic(&ctx.out_dir.join(name), text.as_bytes())?;
        Ok(())
    };
    emit(&mut manifest, "scales.csv", scales_csv(&out))?;
    emit(&mut manifest, "alive.csv", alive_csv(&out))?;
    emit(&mut manifest, "children.csv", children_csv(&out))?;
    emit(&mut manifest, "healthy.csv", healthy_csv(&out))?;
    emit(&mut manifest, "measure.csv", measure_csv(out.measure.as_ref()))?;
    emit(&mut manifest, "intervals.csv", intervals_csv(&out))?;
    emit(&mut manifest, "survivor.csv", survivor_csv(&out))?;
    if with_fit {
        let dim = cfg.dimension.unwrap_or_default();
        let (text, fit) = boxcounts_csv(&out, &dim);
        emit(&mut manifest, "boxcounts.csv", text)?;
        manifest.dimension_fit = Some(fit);
    }

    let exit = construct_exit_code(&out);
    manifest.per_scale = per_scale_summary(&out);
    manifest.start_scale = Some(1);
    manifest.end_scale = Some(out.levels.survival_depth());
    manifest.extinction_scale = out.levels.extinction_scale;
    manifest.nesting_ok = Some(out.nesting.ok);
    manifest.frostman_worst_gap = out.frostman_worst_gap;
    manifest.exit_code = Some(exit);
    manifest.wall_time_ms = Some(t0.elapsed().as_millis() as u64);
    manifest.complete = true;
    manifest.write(&ctx.out_dir)?;
    Ok(exit)
}

fn per_scale_summary(out: &PipelineOutput) -> Vec<PerScale> {
    let depth = out.ladder.depth();
    let alive_counts = out.levels.counts();
    (1..=depth)
        .map(|k| {
            let healthy = out
                .healthy
                .get(k - 1)
                .map(|m| m.iter().filter(|&&b| b).count() as u64);
            let sink_mass = out
                .measure
                .as_ref()
                .and_then(|m| m.levels.get(k - 1))
                .map(|l| l.sink.to_string());
            PerScale {
                scale: k,
                n: out.ladder.n_at(k),
                alive: Some(alive_counts[k - 1] as u64),
                healthy,
                sink_mass,
                nesting_lhs: out.nesting.lhs.get(k - 1).copied(),
            }
        })
        .collect()
}

fn scales_csv(out: &PipelineOutput) -> String {
    let ladder = &out.ladder;
    let mut b = CsvBuilder::new(&[
        "scale",
        "n",
        "m",
        "delta",
        "eta",
        "ell",
        "child_window",
        "widen_radius",
    ]);
    for k in 1..=ladder.depth() {
        let m = if k >= 2 {
            ladder.m_at(k).to_string()
        } else {
            String::new()
        };
        let (eta, ell) = if k < ladder.depth() {
            let g = ladder.grid(k);
            (fmt_f64(g.eta), g.ell().to_string())
        } else {
            (String::new(), String::new())
        };
        let window = if k >= 2 {
            ladder.child_window(k).to_string()
        } else {
            String::new()
        };
        b.row([
            k.to_string(),
            ladder.n_at(k).to_string(),
            m,
            fmt_f64(ladder.delta_at(k)),
            eta,
            ell,
            window,
            fmt_f64(ladder.widen_radius(k)),
        ]);
    }
    b.finish()
}

fn alive_csv(out: &PipelineOutput) -> String {
    let mut b = CsvBuilder::new(&["scale", "slot", "theta"]);
    for (i, mask) in out.levels.alive.iter().enumerate() {
        let n = out.ladder.n_at(i + 1);
        for (slot, &alive) in mask.iter().enumerate() {
            if alive {
                b.row([
                    (i + 1).to_string(),
                    slot.to_string(),
                    fmt_f64(slot as f64 / n as f64),
                ]);
            }
        }
    }
    b.finish()
}

/// Per alive point, the number of good children inside its window at the
/// next scale.
fn children_csv(out: &PipelineOutput) -> String {
    let mut b = CsvBuilder::new(&["scale", "slot", "good_children"]);
    let ladder = &out.ladder;
    for k in 1..ladder.depth() {
        let fine_n = ladder.n_at(k + 1);
        let m = ladder.m_at(k + 1);
        let w = ladder.child_window(k + 1);
        let pref = prefix_counts(&out.good[k - 1].mask);
        for (slot, &alive) in out.levels.alive[k - 1].iter().enumerate() {
            if alive {
                let center = (slot as u64 * m) % fine_n;
                let count = count_window(&pref, fine_n, center, w);
                b.row([k.to_string(), slot.to_string(), count.to_string()]);
            }
        }
    }
    b.finish()
}

fn healthy_csv(out: &PipelineOutput) -> String {
    let mut b = CsvBuilder::new(&["level", "slot", "theta"]);
    for (i, mask) in out.healthy.iter().enumerate() {
        let n = out.ladder.n_at(i + 1);
        for (slot, &h) in mask.iter().enumerate() {
            if h {
                b.row([
                    (i + 1).to_string(),
                    slot.to_string(),
                    fmt_f64(slot as f64 / n as f64),
                ]);
            }
        }
    }
    b.finish()
}

fn measure_csv(measure: Option<&FrostmanMeasure>) -> String {
    let mut b = CsvBuilder::new(&["level", "kind", "slot", "center", "half_width", "mass"]);
    if let Some(m) = measure {
        for (i, level) in m.levels.iter().enumerate() {
            for atom in &level.atoms {
                b.row([
                    (i + 1).to_string(),
                    "interval".to_string(),
                    atom.slot.to_string(),
                    fmt_f64(atom.center),
                    fmt_f64(atom.half_width),
                    atom.mass.to_string(),
                ]);
            }
            b.row([
                (i + 1).to_string(),
                "sink".to_string(),
                String::new(),
                String::new(),
                String::new(),
                level.sink.to_string(),
            ]);
        }
    }
    b.finish()
}

fn intervals_csv(out: &PipelineOutput) -> String {
    let mut b = CsvBuilder::new(&["scale", "component", "lo", "hi"]);
    for (i, set) in out.intervals.iter().enumerate() {
        for (c, &(lo, hi)) in set.parts().iter().enumerate() {
            b.row([
                (i + 1).to_string(),
                c.to_string(),
                fmt_f64(lo),
                fmt_f64(hi),
            ]);
        }
    }
    b.finish()
}

fn survivor_csv(out: &PipelineOutput) -> String {
    let mut b = CsvBuilder::new(&["component", "lo", "hi"]);
    for (c, &(lo, hi)) in out.survivor.parts().iter().enumerate() {
        b.row([c.to_string(), fmt_f64(lo), fmt_f64(hi)]);
    }
    b.finish()
}

fn boxcounts_csv(out: &PipelineOutput, dim: &DimensionConfig) -> (String, FitSummary) {
    let grid = dyadic_eps_grid(dim.eps_from, dim.eps_to);
    let mut b = CsvBuilder::new(&["eps", "count"]);
    for &eps in &grid {
        b.row([fmt_f64(eps), out.survivor.box_count(eps).to_string()]);
    }
    let fit = dimension_fit(&out.survivor, &grid);
    (
        b.finish(),
        FitSummary {
            slope: fit.slope,
            rms: fit.residual,
            eps_from: dim.eps_from,
            eps_to: dim.eps_to,
        },
    )
}
