//! The construction pipeline shared by `construct`, `dimension`, and each
//! sweep cell: ladder, per-scale good masks, alive and healthy sets, the
//! mass distribution, survivor intervals, and the nesting check.
//!
//! Deterministic in `(config, seed)`: scales are evaluated in parallel but
//! collected in order, and every downstream reduction is sequential.

use anyhow::{bail, Context};
use rayon::prelude::*;
use rpslab_core::branching::{
    alive_levels, healthy_levels, healthy_within_alive, nesting_check, survivor_intervals,
    BranchLevels, NestingReport,
};
use rpslab_core::dimension::{intersect_all, IntervalSet};
use rpslab_core::goodness::{good_mask, GoodMask};
use rpslab_core::ladder::{build_ladder, ScaleLadder};
use rpslab_core::measure::{build_measure, check_interval_bound, FrostmanMeasure};
use rpslab_core::noise::StreamId;
use rpslab_core::sums::prefix_envelope_streaming;

use crate::config::RunConfig;

pub struct PipelineOutput {
    pub ladder: ScaleLadder,
    /// `good[i]` is the mask of scale `i + 2`.
    pub good: Vec<GoodMask>,
    pub levels: BranchLevels,
    /// `healthy[i]` is the level `i + 1` mask (levels run `1..=K-2`).
    pub healthy: Vec<Vec<bool>>,
    pub measure: Option<FrostmanMeasure>,
    pub frostman_worst_gap: Option<f64>,
    /// Widened alive intervals per scale.
    pub intervals: Vec<IntervalSet>,
    /// Intersection of the widened alive intervals over all scales.
    pub survivor: IntervalSet,
    pub nesting: NestingReport,
}

/// Bytes of streaming evaluation state per net point (one block row, the
/// compensated cumulative sum, and the running sup).
const EVAL_BYTES_PER_POINT: u64 = 56;

pub fn run_pipeline(cfg: &RunConfig, seed: u64) -> anyhow::Result<PipelineOutput> {
    let ladder = build_ladder(&cfg.ladder, &cfg.coefficients).context("building ladder")?;
    let depth = ladder.depth();

    let eval_bytes: u64 = (2..=depth)
        .map(|k| ladder.n_at(k) * EVAL_BYTES_PER_POINT)
        .sum();
    if eval_bytes > cfg.caps.max_eval_bytes {
        bail!(
            "evaluation state needs {eval_bytes} bytes, cap is {}",
            cfg.caps.max_eval_bytes
        );
    }

    let family = cfg.good.thresholds.family();
    let scales: Vec<usize> = (2..=depth).collect();
    let good: Vec<GoodMask> = scales
        .par_iter()
        .map(|&k| {
            let env = prefix_envelope_streaming(
                &ladder,
                &cfg.coefficients,
                seed,
                k,
                StreamId::Rademacher,
            )?;
            Ok(good_mask(&env, ladder.delta_at(k - 1), &family))
        })
        .collect::<rpslab_core::Result<_>>()
        .context("evaluating block sums")?;

    let levels = alive_levels(&ladder, &good)?;

    let (healthy, measure, frostman_worst_gap) = if depth >= 3 {
        let healthy = healthy_levels(&ladder, &good, cfg.good.tau)?;
        debug_assert!(healthy_within_alive(&levels, &healthy));
        let measure = build_measure(&ladder, &good, &healthy, cfg.good.tau)?;
        let gap = check_interval_bound(&ladder, &measure, cfg.good.tau)?;
        (healthy, Some(measure), Some(gap))
    } else {
        (Vec::new(), None, None)
    };

    let intervals = survivor_intervals(&ladder, &levels.alive)?;
    let survivor = intersect_all(&intervals);
    let nesting = nesting_check(&ladder);

    Ok(PipelineOutput {
        ladder,
        good,
        levels,
        healthy,
        measure,
        frostman_worst_gap,
        intervals,
        survivor,
        nesting,
    })
}

/// Exit code of a construction run: nesting failure dominates extinction.
pub fn construct_exit_code(out: &PipelineOutput) -> i32 {
    if !out.nesting.ok {
        3
    } else if out.levels.extinction_scale.is_some() {
        2
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(delta0: f64) -> RunConfig {
        serde_json::from_str(&format!(
            r#"{{
                "ladder": {{"n1": 16, "depth": 4, "mode": {{"kind": "geometric", "ratio": 4}},
                           "beta_sub": 1.0, "beta_child": 1.0, "beta_widen": 0.5}},
                "coefficients": {{"model": "scaled_sqrt", "delta0": {delta0}}},
                "good": {{"tau": 0.95}},
                "seed": 7
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn zero_coefficients_survive_everywhere() {
        let mut cfg = base_config(0.1);
        cfg.coefficients = rpslab_core::coeffs::CoefficientModel::Table {
            values: vec![num_complex::Complex64::new(0.0, 0.0); 1025],
        };
        let out = run_pipeline(&cfg, 5).unwrap();
        assert!(out.levels.extinction_scale.is_none());
        for g in &out.good {
            assert!(g.mask.iter().all(|&b| b), "zero sums pass every threshold");
        }
        // Good everywhere still prunes to the union of child windows: each
        // alive parent covers 2w+1 child slots, windows never overlap here.
        let mut expected = vec![out.ladder.n_at(1) as usize];
        for k in 2..=out.ladder.depth() {
            let w = out.ladder.child_window(k) as usize;
            expected.push(expected[k - 2] * (2 * w + 1));
        }
        assert_eq!(out.levels.counts(), expected);
        assert_eq!(construct_exit_code(&out), 0);
        let m = out.measure.unwrap();
        for level in &m.levels {
            assert!(num_traits::One::is_one(&level.total()));
        }
    }

    #[test]
    fn zero_thresholds_go_extinct_immediately() {
        let mut cfg = base_config(0.1);
        cfg.good = serde_json::from_str(
            r#"{"thresholds": {"mode": "constant_sup", "level": 0.0}, "tau": 0.95}"#,
        )
        .unwrap();
        let out = run_pipeline(&cfg, 5).unwrap();
        assert_eq!(out.levels.extinction_scale, Some(2));
        assert_eq!(construct_exit_code(&out), 2);
    }

    #[test]
    fn same_seed_reproduces_masks() {
        let cfg = base_config(0.1);
        let a = run_pipeline(&cfg, 99).unwrap();
        let b = run_pipeline(&cfg, 99).unwrap();
        for (x, y) in a.good.iter().zip(&b.good) {
            assert_eq!(x.mask, y.mask);
        }
        let c = run_pipeline(&cfg, 100).unwrap();
        let differs = a
            .good
            .iter()
            .zip(&c.good)
            .any(|(x, y)| x.mask != y.mask);
        assert!(differs, "distinct seeds should disturb some mask");
    }

    #[test]
    fn smaller_delta0_never_loses_alive_points() {
        let small = run_pipeline(&base_config(0.05), 11).unwrap();
        let large = run_pipeline(&base_config(0.4), 11).unwrap();
        for (ms, ml) in small.levels.alive.iter().zip(&large.levels.alive) {
            for (a, b) in ms.iter().zip(ml) {
                assert!(*a || !*b, "alive sets must nest across delta0 at one seed");
            }
        }
    }

    #[test]
    fn eval_cap_enforced() {
        let mut cfg = base_config(0.1);
        cfg.caps.max_eval_bytes = 1024;
        assert!(run_pipeline(&cfg, 5).is_err());
    }
}
