//! The `diagnose` subcommand: Monte Carlo and exact checks of the
//! probabilistic ingredients, with one CSV per check and a JSON verdict
//! summary.
//!
//! Every check derives its randomness from the run seed through the shared
//! per-purpose labels, so two runs with one seed agree byte for byte. The
//! aggregate verdict is the conjunction of the individual verdicts; a false
//! verdict is data, not an error, so the exit code stays 0.

use std::time::Instant;

use anyhow::bail;
use num_complex::Complex64;
use rpslab_core::coeffs::CoefficientModel;
use rpslab_core::diagnostics::{
    equality_instance, event_e1_frequency, event_e2_frequency, gci_check_mc, large_sieve_check,
    lindeberg_discrepancy, one_point_probability_mc, random_sieve_instance, random_slab_pair,
    rho_correlation_count, seed_labels, small_ball_mc, small_ball_series,
    stay_small_probability_mc, MCEstimate, PolyTerm, TestFunctional, STAY_SMALL_THETA,
};
use rpslab_core::goodness::ThresholdFamily;
use rpslab_core::ladder::{build_ladder, ScaleLadder};
use rpslab_core::noise::{derive_seed, mix64, NoiseStream, StreamId};
use serde_json::{json, Map, Value};

use crate::config::{DiagnoseConfig, RunConfig};
use crate::csvio::{fmt_f64, write_atomic, CsvBuilder};
use crate::manifest::Manifest;
use crate::RunContext;

pub const KNOWN_CHECKS: [&str; 8] = [
    "large_sieve",
    "correlation",
    "one_point",
    "stay_small",
    "lindeberg",
    "gci",
    "small_ball",
    "events",
];

struct CheckOutput {
    verdict: bool,
    details: Value,
    csv: String,
}

pub fn run(cfg: &RunConfig, ctx: &RunContext) -> anyhow::Result<i32> {
    let dc = cfg.diagnose.clone().unwrap_or_default();
    for name in &dc.selectors {
        if !KNOWN_CHECKS.contains(&name.as_str()) {
            bail!(
                "unknown diagnostic {name:?}; known: {}",
                KNOWN_CHECKS.join(", ")
            );
        }
    }

    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut manifest = Manifest::begin(ctx.command, cfg, ctx.seed, ctx.seed_source, &ctx.out_dir);
    manifest.write(&ctx.out_dir)?;
    let t0 = Instant::now();

    let ladder = build_ladder(&cfg.ladder, &cfg.coefficients)?;
    let mut checks = Map::new();
    let mut aggregate = true;
    for name in &dc.selectors {
        let out = match name.as_str() {
            "large_sieve" => check_large_sieve(&dc, ctx.seed)?,
            "correlation" => check_correlation(&dc, &ladder, &cfg.coefficients, ctx.seed)?,
            "one_point" => check_one_point(&dc, &ladder, &cfg.coefficients, ctx.seed)?,
            "stay_small" => check_stay_small(&dc, ctx.seed)?,
            "lindeberg" => check_lindeberg(&dc, ctx.seed)?,
            "gci" => check_gci(&dc, ctx.seed)?,
            "small_ball" => check_small_ball(&dc, ctx.seed)?,
            "events" => check_events(&dc, &ladder, &cfg.coefficients, cfg, ctx.seed)?,
            _ => unreachable!("selector validated above"),
        };
        aggregate &= out.verdict;
        let mut details = out.details;
        details
            .as_object_mut()
            .expect("check details are an object")
            .insert("pass".into(), Value::Bool(out.verdict));
        checks.insert(name.clone(), details);
        let file = format!("diag_{name}.csv");
        manifest.add_output(&file, out.csv.as_bytes());
        write_atomic(&ctx.out_dir.join(file), out.csv.as_bytes())?;
    }

    let verdicts = json!({ "aggregate": aggregate, "checks": Value::Object(checks) });
    let mut text = serde_json::to_string_pretty(&verdicts)?;
    text.push('\n');
    manifest.add_output("verdicts.json", text.as_bytes());
    write_atomic(&ctx.out_dir.join("verdicts.json"), text.as_bytes())?;

    let elapsed = t0.elapsed().as_millis() as u64;
    manifest.aggregate_verdict = Some(aggregate);
    manifest.within_time_cap = dc.time_cap_ms.map(|cap| elapsed <= cap);
    manifest.exit_code = Some(0);
    manifest.wall_time_ms = Some(elapsed);
    manifest.complete = true;
    manifest.write(&ctx.out_dir)?;
    Ok(0)
}

fn check_large_sieve(dc: &DiagnoseConfig, seed: u64) -> anyhow::Result<CheckOutput> {
    let mut b = CsvBuilder::new(&[
        "case",
        "index",
        "phases",
        "lhs",
        "rhs",
        "slack",
        "separation",
        "holds",
    ]);
    let mut all_hold = true;
    let mut worst_slack = f64::INFINITY;
    for i in 0..dc.sieve_instances {
        let inst = random_sieve_instance(seed, i);
        let rep = large_sieve_check(&inst)?;
        all_hold &= rep.holds;
        worst_slack = worst_slack.min(rep.slack);
        b.row([
            "random".to_string(),
            i.to_string(),
            inst.phases.len().to_string(),
            fmt_f64(rep.lhs),
            fmt_f64(rep.rhs),
            fmt_f64(rep.slack),
            fmt_f64(rep.separation.unwrap_or(f64::NAN)),
            rep.holds.to_string(),
        ]);
    }
    let eq = equality_instance(64);
    let eq_rep = large_sieve_check(&eq)?;
    let eq_rel = (eq_rep.lhs - eq_rep.rhs).abs() / eq_rep.rhs;
    b.row([
        "equality".to_string(),
        "0".to_string(),
        eq.phases.len().to_string(),
        fmt_f64(eq_rep.lhs),
        fmt_f64(eq_rep.rhs),
        fmt_f64(eq_rep.slack),
        fmt_f64(eq_rep.separation.unwrap_or(f64::NAN)),
        eq_rep.holds.to_string(),
    ]);
    let verdict = all_hold && eq_rel <= 1e-9;
    Ok(CheckOutput {
        verdict,
        details: json!({
            "instances": dc.sieve_instances,
            "worst_slack": worst_slack,
            "equality_rel_err": eq_rel,
        }),
        csv: b.finish(),
    })
}

/// Strictly increasing angles on a jittered uniform grid, pairwise
/// separation at least `1/(2 count)`.
pub fn jittered_angles(seed: u64, count: u64) -> Vec<f64> {
    let aux = NoiseStream::new(seed, StreamId::Auxiliary(0));
    (0..count)
        .map(|i| (i as f64 + 0.25 + 0.5 * aux.open01_at(i)) / count as f64)
        .collect()
}

fn check_correlation(
    dc: &DiagnoseConfig,
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    seed: u64,
) -> anyhow::Result<CheckOutput> {
    let master = derive_seed(seed, seed_labels::CORRELATION, 0);
    let points = jittered_angles(master, dc.correlation_points);
    let cap = points.len() * points.len();
    let rep = rho_correlation_count(&points, ladder, coeffs, dc.correlation_scale, dc.rho, cap)?;
    let mut b = CsvBuilder::new(&["i", "j", "max_stat", "correlated"]);
    let mut correlated = 0u64;
    let mut stats_consistent = true;
    for p in &rep.pairs {
        if p.correlated {
            correlated += 1;
            stats_consistent &= p.max_stat > dc.rho;
        }
        b.row([
            p.i.to_string(),
            p.j.to_string(),
            fmt_f64(p.max_stat),
            p.correlated.to_string(),
        ]);
    }
    let count_consistent =
        rep.per_point_counts.iter().sum::<usize>() as u64 == 2 * correlated;
    let within_predicted = (correlated as f64) <= 4.0 * rep.predicted_count + 2.0;
    let verdict = stats_consistent && count_consistent && within_predicted;
    Ok(CheckOutput {
        verdict,
        details: json!({
            "points": dc.correlation_points,
            "rho": dc.rho,
            "separation": rep.separation,
            "correlated_pairs": correlated,
            "predicted_count": rep.predicted_count,
        }),
        csv: b.finish(),
    })
}

fn check_one_point(
    dc: &DiagnoseConfig,
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    seed: u64,
) -> anyhow::Result<CheckOutput> {
    let family = ThresholdFamily::one_point();
    let rep = one_point_probability_mc(
        ladder,
        coeffs,
        dc.onepoint_scale,
        STAY_SMALL_THETA,
        dc.trials,
        &family,
        seed,
    )?;
    let gap = (rep.rademacher.estimate - rep.gaussian.estimate).abs();
    let comb = rep.rademacher.combined_stderr(&rep.gaussian);
    let delta_prev = ladder.delta_at(dc.onepoint_scale - 1);
    let fitted_constant = if delta_prev.is_finite() && delta_prev > 0.0 {
        rep.rademacher.estimate / delta_prev.sqrt()
    } else {
        f64::NAN
    };
    let mut b = CsvBuilder::new(&[
        "driver",
        "trials",
        "hits",
        "estimate",
        "stderr",
        "sup_threshold",
        "end_threshold",
    ]);
    for (driver, est) in [("rademacher", &rep.rademacher), ("gaussian", &rep.gaussian)] {
        b.row([
            driver.to_string(),
            est.trials.to_string(),
            fmt_f64(est.sum),
            fmt_f64(est.estimate),
            fmt_f64(est.stderr),
            fmt_f64(rep.sup_threshold),
            fmt_f64(rep.end_threshold),
        ]);
    }
    let verdict = gap <= 5.0 * comb + 1e-12;
    Ok(CheckOutput {
        verdict,
        details: json!({
            "scale": dc.onepoint_scale,
            "gap": gap,
            "combined_stderr": comb,
            "fitted_constant": fitted_constant,
        }),
        csv: b.finish(),
    })
}

fn check_stay_small(dc: &DiagnoseConfig, seed: u64) -> anyhow::Result<CheckOutput> {
    let mut deltas = dc.stay_deltas.clone();
    deltas.sort_by(|a, b| a.partial_cmp(b).expect("finite stay_deltas"));
    let mut estimates: Vec<MCEstimate> = Vec::with_capacity(deltas.len());
    let mut b = CsvBuilder::new(&["delta0", "trials", "hits", "estimate", "stderr"]);
    for &d in &deltas {
        let est = stay_small_probability_mc(dc.stay_n0, dc.stay_eps, d, dc.trials, seed)?;
        b.row([
            fmt_f64(d),
            est.trials.to_string(),
            fmt_f64(est.sum),
            fmt_f64(est.estimate),
            fmt_f64(est.stderr),
        ]);
        estimates.push(est);
    }
    let first = &estimates[0];
    let last = &estimates[estimates.len() - 1];
    let contrast = first.estimate - last.estimate;
    let contrast_ok = deltas.len() < 2
        || contrast >= 3.0 * first.combined_stderr(last);
    let mut monotone_ok = true;
    for w in estimates.windows(2) {
        monotone_ok &= w[1].estimate <= w[0].estimate + 2.0 * w[0].combined_stderr(&w[1]);
    }
    Ok(CheckOutput {
        verdict: contrast_ok && monotone_ok,
        details: json!({
            "n0": dc.stay_n0,
            "eps": dc.stay_eps,
            "contrast": contrast,
            "contrast_stderr": first.combined_stderr(last),
        }),
        csv: b.finish(),
    })
}

/// A reference quadratic in the four components; degree 2 means the swap
/// discrepancy is pure Monte Carlo noise.
pub fn quadratic_functional() -> TestFunctional {
    TestFunctional::Polynomial {
        terms: vec![
            PolyTerm {
                powers: [2, 0, 0, 0],
                coeff: 1.0,
            },
            PolyTerm {
                powers: [0, 1, 0, 1],
                coeff: 0.5,
            },
            PolyTerm {
                powers: [0, 0, 2, 0],
                coeff: -0.75,
            },
            PolyTerm {
                powers: [1, 0, 0, 0],
                coeff: 0.3,
            },
        ],
    }
}

/// Random smoothed-indicator instance `index`: complex weights over a
/// dyadic block with square-root decay, and cutoff scales in `[0.5, 2]`.
pub fn smoothed_instance(
    master: u64,
    index: u64,
) -> (Vec<Complex64>, Vec<Complex64>, TestFunctional) {
    let h = mix64(master ^ index);
    let alpha = 0.5 + 1.5 * (h & 0xFFFF) as f64 / 65535.0;
    let beta = 0.5 + 1.5 * ((h >> 16) & 0xFFFF) as f64 / 65535.0;
    let m = 4 + (h >> 32) % 3;
    let aux = NoiseStream::new(derive_seed(master, index, 1), StreamId::Auxiliary(1));
    let block = |offset: u64| -> Vec<Complex64> {
        (1u64 << m..1u64 << (m + 1))
            .enumerate()
            .map(|(i, n)| {
                let phase = std::f64::consts::TAU * aux.open01_at(offset + i as u64);
                Complex64::from_polar((n as f64).powf(-0.5), phase)
            })
            .collect()
    };
    let a = block(0);
    let b = block(1 << 20);
    (a, b, TestFunctional::SmoothedIndicator { alpha, beta })
}

fn check_lindeberg(dc: &DiagnoseConfig, seed: u64) -> anyhow::Result<CheckOutput> {
    let master = derive_seed(seed, seed_labels::LINDEBERG, 0);
    let mut b = CsvBuilder::new(&["case", "gap", "gap_stderr", "bound", "ok"]);
    let quad_weights: Vec<Complex64> = (16u64..32)
        .map(|n| Complex64::new((n as f64).powf(-0.5), 0.0))
        .collect();
    let quad = lindeberg_discrepancy(
        &quad_weights,
        &quad_weights,
        &quadratic_functional(),
        dc.trials,
        master,
    )?;
    let quad_ok = quad.gap <= 4.0 * quad.gap_stderr + 1e-12;
    b.row([
        "poly_quadratic".to_string(),
        fmt_f64(quad.gap),
        fmt_f64(quad.gap_stderr),
        fmt_f64(quad.bound),
        quad_ok.to_string(),
    ]);
    let mut smoothed_ok = true;
    let mut worst_ratio = 0.0f64;
    for i in 0..dc.lindeberg_instances {
        let (a, w, f) = smoothed_instance(master, i);
        let rep = lindeberg_discrepancy(&a, &w, &f, dc.trials, derive_seed(master, 2, i))?;
        let ok = rep.gap <= 10.0 * rep.bound;
        smoothed_ok &= ok;
        worst_ratio = worst_ratio.max(rep.gap / rep.bound);
        b.row([
            format!("smoothed_{i}"),
            fmt_f64(rep.gap),
            fmt_f64(rep.gap_stderr),
            fmt_f64(rep.bound),
            ok.to_string(),
        ]);
    }
    Ok(CheckOutput {
        verdict: quad_ok && smoothed_ok,
        details: json!({
            "trials": dc.trials,
            "quadratic_gap": quad.gap,
            "quadratic_stderr": quad.gap_stderr,
            "smoothed_instances": dc.lindeberg_instances,
            "worst_gap_over_bound": worst_ratio,
        }),
        csv: b.finish(),
    })
}

fn check_gci(dc: &DiagnoseConfig, seed: u64) -> anyhow::Result<CheckOutput> {
    let master = derive_seed(seed, seed_labels::GCI, 0);
    let mut b = CsvBuilder::new(&[
        "index", "d", "p_joint", "p_k", "p_l", "margin", "stderr", "ok",
    ]);
    let mut all_ok = true;
    let mut worst_sigma = f64::INFINITY;
    for i in 0..dc.gci_pairs {
        let d = 2 + (i as usize % 5);
        let (k, l) = random_slab_pair(master, i, d);
        let rep = gci_check_mc(d, &k, &l, dc.trials, derive_seed(master, 1, i))?;
        let ok = rep.margin >= -3.0 * rep.stderr;
        all_ok &= ok;
        if rep.stderr > 0.0 {
            worst_sigma = worst_sigma.min(rep.margin / rep.stderr);
        }
        b.row([
            i.to_string(),
            d.to_string(),
            fmt_f64(rep.p_joint),
            fmt_f64(rep.p_k),
            fmt_f64(rep.p_l),
            fmt_f64(rep.margin),
            fmt_f64(rep.stderr),
            ok.to_string(),
        ]);
    }
    Ok(CheckOutput {
        verdict: all_ok,
        details: json!({
            "pairs": dc.gci_pairs,
            "trials": dc.trials,
            "worst_margin_sigmas": worst_sigma,
        }),
        csv: b.finish(),
    })
}

fn check_small_ball(dc: &DiagnoseConfig, seed: u64) -> anyhow::Result<CheckOutput> {
    let master = derive_seed(seed, seed_labels::SMALL_BALL, 0);
    let mut b = CsvBuilder::new(&["a", "series", "mc", "stderr", "steps", "paths", "ok"]);
    let mut all_ok = true;
    let mut worst_rel = 0.0f64;
    for (i, a) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let series = small_ball_series(a)?;
        let mc = small_ball_mc(a, dc.ball_steps, dc.ball_paths, derive_seed(master, 1, i as u64))?;
        let ok = (mc.estimate - series).abs() <= 0.05 * series + 4.0 * mc.stderr;
        all_ok &= ok;
        worst_rel = worst_rel.max((mc.estimate - series).abs() / series);
        b.row([
            fmt_f64(a),
            fmt_f64(series),
            fmt_f64(mc.estimate),
            fmt_f64(mc.stderr),
            dc.ball_steps.to_string(),
            dc.ball_paths.to_string(),
            ok.to_string(),
        ]);
    }
    let saturation = (small_ball_series(100.0)? - 1.0).abs();
    let verdict = all_ok && saturation <= 1e-6;
    Ok(CheckOutput {
        verdict,
        details: json!({
            "worst_rel_err": worst_rel,
            "saturation_err": saturation,
        }),
        csv: b.finish(),
    })
}

fn check_events(
    dc: &DiagnoseConfig,
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    cfg: &RunConfig,
    seed: u64,
) -> anyhow::Result<CheckOutput> {
    let cap = cfg.caps.max_subset;
    let e1 = event_e1_frequency(
        ladder,
        coeffs,
        dc.event_scale,
        dc.trials,
        seed,
        cap,
        dc.e1_threshold,
    )?;
    let e2 = event_e2_frequency(
        ladder,
        coeffs,
        dc.event_scale,
        dc.trials,
        seed,
        cap,
        dc.e2_threshold,
    )?;
    let mut b = CsvBuilder::new(&[
        "event",
        "threshold",
        "trials",
        "hits",
        "estimate",
        "stderr",
        "union_bound",
        "ok",
    ]);
    let mut verdict = true;
    for (name, rep) in [("block_sum_tail", &e1), ("derivative_tail", &e2)] {
        let ok = rep.estimate.estimate <= rep.union_bound + 3.0 * rep.estimate.stderr + 1e-9;
        verdict &= ok;
        b.row([
            name.to_string(),
            fmt_f64(rep.threshold),
            rep.estimate.trials.to_string(),
            fmt_f64(rep.estimate.sum),
            fmt_f64(rep.estimate.estimate),
            fmt_f64(rep.estimate.stderr),
            fmt_f64(rep.union_bound),
            ok.to_string(),
        ]);
    }
    Ok(CheckOutput {
        verdict,
        details: json!({
            "scale": dc.event_scale,
            "e1_frequency": e1.estimate.estimate,
            "e1_union_bound": e1.union_bound,
            "e2_frequency": e2.estimate.estimate,
            "e2_union_bound": e2.union_bound,
        }),
        csv: b.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::SeedSource;

    fn ctx(dir: &std::path::Path) -> RunContext {
        RunContext {
            seed: 11,
            seed_source: SeedSource::Config,
            out_dir: dir.to_path_buf(),
            pool: rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap(),
            command: "diagnose",
        }
    }

    fn config(selectors: &[&str]) -> RunConfig {
        let mut cfg: RunConfig = serde_json::from_str(
            r#"{
                "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4},
                           "beta_sub": 1.0, "beta_child": 1.0, "beta_widen": 0.5},
                "coefficients": {"model": "scaled_sqrt", "delta0": 0.1},
                "diagnose": {"trials": 2000, "sieve_instances": 40, "ball_paths": 4000,
                             "lindeberg_instances": 3, "gci_pairs": 6,
                             "e1_threshold": 1.0}
            }"#,
        )
        .unwrap();
        cfg.diagnose.as_mut().unwrap().selectors =
            selectors.iter().map(|s| s.to_string()).collect();
        cfg
    }

    #[test]
    fn empty_selector_is_a_noop_with_empty_report() {
        let dir = tempfile::tempdir().unwrap();
        let code = run(&config(&[]), &ctx(dir.path())).unwrap();
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("verdicts.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(v["aggregate"], true);
        assert!(v["checks"].as_object().unwrap().is_empty());
    }

    #[test]
    fn unknown_selector_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run(&config(&["large_sieve", "no_such_check"]), &ctx(dir.path()))
            .unwrap_err()
            .to_string();
        assert!(err.contains("no_such_check"), "{err}");
    }

    #[test]
    fn sieve_check_passes_and_emits_rows() {
        let dir = tempfile::tempdir().unwrap();
        run(&config(&["large_sieve"]), &ctx(dir.path())).unwrap();
        let v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("verdicts.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(v["aggregate"], true);
        assert_eq!(v["checks"]["large_sieve"]["pass"], true);
        let rows = crate::csvio::parse_rows(
            &std::fs::read_to_string(dir.path().join("diag_large_sieve.csv")).unwrap(),
        )
        .unwrap();
        assert_eq!(rows.len(), 41);
        assert_eq!(rows[40][0], "equality");
    }

    #[test]
    fn jittered_angles_are_separated_and_sorted() {
        let pts = jittered_angles(42, 48);
        for w in pts.windows(2) {
            assert!(w[1] - w[0] >= 1.0 / 96.0 - 1e-12);
        }
        assert!(pts[0] > 0.0 && *pts.last().unwrap() < 1.0);
    }

    #[test]
    fn smoothed_instances_are_deterministic_and_dyadic() {
        let (a1, b1, f1) = smoothed_instance(9, 4);
        let (a2, b2, f2) = smoothed_instance(9, 4);
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        match (f1, f2) {
            (
                TestFunctional::SmoothedIndicator { alpha: x, beta: y },
                TestFunctional::SmoothedIndicator { alpha: u, beta: v },
            ) => {
                assert_eq!(x, u);
                assert_eq!(y, v);
                assert!((0.5..=2.0).contains(&x) && (0.5..=2.0).contains(&y));
            }
            _ => panic!("expected smoothed indicators"),
        }
        assert!(a1.len().is_power_of_two());
        assert_ne!(a1, b1);
    }

    #[test]
    fn verdicts_are_reproducible_across_runs() {
        let cfg = config(&["stay_small", "events"]);
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        run(&cfg, &ctx(d1.path())).unwrap();
        run(&cfg, &ctx(d2.path())).unwrap();
        for name in ["verdicts.json", "diag_stay_small.csv", "diag_events.csv"] {
            assert_eq!(
                std::fs::read(d1.path().join(name)).unwrap(),
                std::fs::read(d2.path().join(name)).unwrap(),
                "{name} differs"
            );
        }
    }
}
