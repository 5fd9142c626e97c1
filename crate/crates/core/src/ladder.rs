//! Scale ladders: the nested sequence `N_1 < N_2 < ... < N_K`, the ratios
//! `M_k = N_k / N_{k-1}`, the per-scale decay parameters `delta_k`, and the
//! geometric sub-scale grids that partition each transition `[N_k, N_{k+1}]`
//! into blocks.
//!
//! Logs are natural throughout.

use crate::coeffs::CoefficientModel;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default sub-scale exponent for honest-scale configurations.
pub const DEFAULT_BETA_SUB: f64 = 10.0;
/// Default child-radius exponent.
pub const DEFAULT_BETA_CHILD: f64 = 8.0;
/// Default interval-widening exponent.
pub const DEFAULT_BETA_WIDEN: f64 = 5.0;

/// How successive scales grow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LadderMode {
    /// `M_{k+1} = floor(ln N_k) ^ floor(ln ln N_k)`, the log-power recursion.
    LogPower,
    /// Fixed integer ratio per step (desk-scale experiments).
    Geometric { ratio: u64 },
}

/// Everything needed to build a ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    /// First scale, `>= 8` (so `ln ln N_1 > 0`).
    pub n1: u64,
    /// Number of scales `K >= 2`.
    pub depth: usize,
    pub mode: LadderMode,
    /// Sub-scale exponent: grids use `eta_k = (ln N_k)^{-beta_sub}`.
    #[serde(default = "default_beta_sub")]
    pub beta_sub: f64,
    /// Child-radius exponent: windows have angular radius
    /// `N_k^{-1} (ln N_k)^{-beta_child}`.
    #[serde(default = "default_beta_child")]
    pub beta_child: f64,
    /// Widening exponent: survivor intervals have angular radius
    /// `N_k^{-1} (ln N_k)^{-beta_widen}`.
    #[serde(default = "default_beta_widen")]
    pub beta_widen: f64,
}

fn default_beta_sub() -> f64 {
    DEFAULT_BETA_SUB
}
fn default_beta_child() -> f64 {
    DEFAULT_BETA_CHILD
}
fn default_beta_widen() -> f64 {
    DEFAULT_BETA_WIDEN
}

impl LadderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n1 < 8 {
            return Err(Error::InvalidParameter(format!(
                "n1 must be >= 8, got {}",
                self.n1
            )));
        }
        if self.depth < 2 {
            return Err(Error::InvalidParameter(format!(
                "depth must be >= 2, got {}",
                self.depth
            )));
        }
        for (name, v) in [
            ("beta_sub", self.beta_sub),
            ("beta_child", self.beta_child),
            ("beta_widen", self.beta_widen),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if let LadderMode::Geometric { ratio } = self.mode {
            if ratio < 2 {
                return Err(Error::InvalidParameter(format!(
                    "geometric ratio must be >= 2, got {ratio}"
                )));
            }
        }
        Ok(())
    }
}

/// One transition's geometric checkpoint grid: strictly increasing integers
/// `r_0 = N_k < r_1 < ... < r_ell = N_{k+1}` with consecutive ratios in
/// `[1 + eta, 1 + 2 eta]` (at most one final adjusted block).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubscaleGrid {
    pub points: Vec<u64>,
    pub eta: f64,
}

impl SubscaleGrid {
    /// Number of blocks (`points.len() - 1`).
    pub fn ell(&self) -> usize {
        self.points.len() - 1
    }

    /// Half-open index range `[r_j, r_{j+1})` of block `j` (0-based).
    pub fn block(&self, j: usize) -> (u64, u64) {
        (self.points[j], self.points[j + 1])
    }

    /// Iterate all blocks as half-open ranges.
    pub fn blocks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }
}

/// A fully built ladder. Serializes to `{config, N, M, delta, subscales}`
/// with non-finite `delta` entries as `null` (`delta_1` is `+inf` by
/// definition: `(ln 1)^{-1/2}`).
#[derive(Clone, Debug, Serialize)]
pub struct ScaleLadder {
    pub config: LadderConfig,
    #[serde(rename = "N")]
    pub n: Vec<u64>,
    /// Ratios `M_2..M_K` (`m[i]` is the ratio into scale `i + 2`).
    #[serde(rename = "M")]
    pub m: Vec<u64>,
    /// Decay parameters `delta_1..delta_K`.
    #[serde(serialize_with = "ser_f64s_nonfinite_null")]
    pub delta: Vec<f64>,
    /// Grids for transitions `1..=K-1`; `subscales[i]` spans
    /// `[N_{i+1}, N_{i+2}]`.
    pub subscales: Vec<SubscaleGrid>,
}

fn ser_f64s_nonfinite_null<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        if x.is_finite() {
            seq.serialize_element(&x)?;
        } else {
            seq.serialize_element(&Option::<f64>::None)?;
        }
    }
    seq.end()
}

impl ScaleLadder {
    /// Number of scales `K`.
    pub fn depth(&self) -> usize {
        self.n.len()
    }

    /// `N_k`, 1-based.
    pub fn n_at(&self, k: usize) -> u64 {
        self.n[k - 1]
    }

    /// `M_k` for `k = 2..=K`.
    pub fn m_at(&self, k: usize) -> u64 {
        self.m[k - 2]
    }

    /// `delta_k`, 1-based (`delta_1 = +inf`).
    pub fn delta_at(&self, k: usize) -> f64 {
        self.delta[k - 1]
    }

    /// Grid of transition `k` (spans `[N_k, N_{k+1}]`), `k = 1..=K-1`.
    pub fn grid(&self, k: usize) -> &SubscaleGrid {
        &self.subscales[k - 1]
    }

    /// Block counts per transition.
    pub fn ell_list(&self) -> Vec<usize> {
        self.subscales.iter().map(SubscaleGrid::ell).collect()
    }

    /// Advisory notes: steps whose growth is slower than `ln N` cannot
    /// satisfy the intended asymptotic regime; surfaced, not fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in 2..=self.depth() {
            let prev = self.n_at(k - 1) as f64;
            if (self.m_at(k) as f64) < prev.ln() {
                out.push(format!(
                    "step into scale {k}: ratio {} < ln N_{} = {:.3}",
                    self.m_at(k),
                    k - 1,
                    prev.ln()
                ));
            }
        }
        out
    }

    /// Canonical JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ladder serialization cannot fail")
    }

    /// Compact content fingerprint of the canonical JSON.
    pub fn content_hash64(&self) -> u64 {
        crate::hashutil::sha256_prefix64(self.to_json().as_bytes())
    }

    /// Child-window halfwidth, in slots of `S_k`, of the map from scale
    /// `k - 1` into scale `k` (`k = 2..=K`): the angular radius
    /// `N_{k-1}^{-1} (ln N_{k-1})^{-beta_child}` scaled by `N_k`, floored
    /// (slot distances are integers and the bound is closed).
    pub fn child_window(&self, k: usize) -> u64 {
        let m = self.m_at(k) as f64;
        let radius = m * (self.n_at(k - 1) as f64).ln().powf(-self.config.beta_child);
        radius.floor() as u64
    }

    /// Angular halfwidth of survivor intervals at scale `k`.
    pub fn widen_radius(&self, k: usize) -> f64 {
        let n = self.n_at(k) as f64;
        n.ln().powf(-self.config.beta_widen) / n
    }
}

/// Builds the ladder: integer scale recursion, decay parameters
/// `delta_k = max{(ln k)^{-1/2}, sup_{n >= N_k} n^{-1/2} |a_n|}`, and one
/// sub-scale grid per transition.
pub fn build_ladder(cfg: &LadderConfig, coeffs: &CoefficientModel) -> Result<ScaleLadder> {
    cfg.validate()?;
    coeffs.validate()?;

    let mut n = vec![cfg.n1];
    let mut m = Vec::new();
    for scale in 2..=cfg.depth {
        let prev = *n.last().unwrap();
        let ratio = match cfg.mode {
            LadderMode::Geometric { ratio } => ratio,
            LadderMode::LogPower => log_power_ratio(prev, scale)?,
        };
        if ratio < 2 {
            return Err(Error::DegenerateStep { scale, ratio });
        }
        let next = prev.checked_mul(ratio).ok_or_else(|| Error::LadderOverflow {
            scale,
            detail: format!("{prev} * {ratio} exceeds u64"),
        })?;
        m.push(ratio);
        n.push(next);
    }

    if let Some(len) = coeffs.table_len() {
        let needed = *n.last().unwrap();
        if len < needed {
            return Err(Error::TableTooShort {
                needed,
                have: len as usize,
            });
        }
    }

    let delta: Vec<f64> = (1..=cfg.depth)
        .map(|k| {
            let log_term = (k as f64).ln().powf(-0.5);
            log_term.max(coeffs.tail_envelope(n[k - 1]))
        })
        .collect();

    let mut subscales = Vec::new();
    for k in 1..cfg.depth {
        let eta = (n[k - 1] as f64).ln().powf(-cfg.beta_sub);
        subscales.push(subscale_grid(n[k - 1], n[k], eta)?);
    }

    let ladder = ScaleLadder {
        config: cfg.clone(),
        n,
        m,
        delta,
        subscales,
    };

    for k in 2..=ladder.depth() {
        let w = ladder.child_window(k);
        if 2 * w + 1 > ladder.m_at(k) {
            return Err(Error::InvalidParameter(format!(
                "child windows overlap at scale {k}: 2*{w}+1 > M_{k} = {} \
                 (raise beta_child or n1)",
                ladder.m_at(k)
            )));
        }
    }

    Ok(ladder)
}

/// The log-power step `floor(ln N)^floor(ln ln N)` with overflow checking.
fn log_power_ratio(prev: u64, scale: usize) -> Result<u64> {
    let ln = (prev as f64).ln();
    let base = ln.floor() as u64;
    let exp = ln.ln().floor();
    if exp < 0.0 {
        return Err(Error::DegenerateStep { scale, ratio: 0 });
    }
    let exp = exp as u32;
    base.checked_pow(exp).ok_or_else(|| Error::LadderOverflow {
        scale,
        detail: format!("{base}^{exp} exceeds u64"),
    })
}

/// Builds one geometric checkpoint grid over `[lo, hi]` with target
/// consecutive ratios in `[1 + eta, 1 + 2 eta]`.
///
/// Placement: `ell = round(ln(hi/lo) / ln(1 + 1.5 eta))` log-equispaced
/// points, rounded to integers, deduplicated; points that land closer than
/// ratio `1 + eta` to their predecessor are dropped, and if the final block
/// still falls short the last two blocks are merged (the single permitted
/// adjusted block). A non-final block outside `[1 + eta, 1 + 2 eta]` is a
/// configuration error.
pub fn subscale_grid(lo: u64, hi: u64, eta: f64) -> Result<SubscaleGrid> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "grid eta must be finite and > 0, got {eta}"
        )));
    }
    if hi <= lo {
        return Err(Error::GridTooTight {
            lo,
            hi,
            min_ratio: 1.0 + eta,
        });
    }
    let big_r = hi as f64 / lo as f64;
    if big_r < 1.0 + eta {
        return Err(Error::GridTooTight {
            lo,
            hi,
            min_ratio: 1.0 + eta,
        });
    }
    // Integer grids need room for a whole step inside [1+eta, 1+2eta]:
    // with 2*lo*eta < 1 no integer point can respect the upper ratio bound.
    if 2.0 * lo as f64 * eta < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "grid eta = {eta} too small for integer checkpoints starting at {lo} \
             (eta * N < 1/2); lower beta_sub or raise the scales"
        )));
    }

    let q = 1.0 + 1.5 * eta;
    let ell = (big_r.ln() / q.ln()).round().max(1.0) as usize;
    let mut pts: Vec<u64> = Vec::with_capacity(ell + 1);
    pts.push(lo);
    for j in 1..ell {
        let r = (lo as f64 * big_r.powf(j as f64 / ell as f64)).round() as u64;
        if r > *pts.last().unwrap() && r < hi {
            pts.push(r);
        }
    }
    pts.push(hi);

    // Drop interior points whose step ratio is below 1 + eta.
    let mut kept: Vec<u64> = vec![pts[0]];
    for (i, &p) in pts.iter().enumerate().skip(1) {
        let last = *kept.last().unwrap() as f64;
        if i == pts.len() - 1 || p as f64 / last >= 1.0 + eta {
            kept.push(p);
        }
    }
    if kept.len() >= 3 {
        let l = kept.len();
        if (kept[l - 1] as f64) / (kept[l - 2] as f64) < 1.0 + eta {
            kept.remove(l - 2);
        }
    }

    // All blocks except the final one must respect the ratio window.
    for w in kept.windows(2).take(kept.len().saturating_sub(2)) {
        let ratio = w[1] as f64 / w[0] as f64;
        if ratio < 1.0 + eta || ratio > 1.0 + 2.0 * eta {
            return Err(Error::InvalidParameter(format!(
                "sub-scale grid over [{lo}, {hi}] with eta = {eta} has interior \
                 block ratio {ratio} outside [1+eta, 1+2eta]"
            )));
        }
    }

    Ok(SubscaleGrid { points: kept, eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(n1: u64, depth: usize, mode: LadderMode) -> LadderConfig {
        LadderConfig {
            n1,
            depth,
            mode,
            beta_sub: 1.0,
            beta_child: 1.0,
            beta_widen: 0.5,
        }
    }

    fn unit_coeffs() -> CoefficientModel {
        CoefficientModel::ScaledSqrt { delta0: 1.0 }
    }

    // Frozen against an arbitrary-precision evaluation of the recursion.
    #[test]
    fn log_power_ladder_from_1000() {
        let cfg = config(1000, 7, LadderMode::LogPower);
        let ladder = build_ladder(&cfg, &unit_coeffs()).unwrap();
        assert_eq!(
            ladder.n,
            vec![
                1000,
                6000,
                384_000,
                55_296_000,
                15_980_544_000,
                194_435_278_848_000,
                6_371_255_217_291_264_000,
            ]
        );
        assert_eq!(ladder.m, vec![6, 64, 144, 289, 12167, 32768]);
    }

    #[test]
    fn log_power_overflows_at_depth_8() {
        let cfg = config(1000, 8, LadderMode::LogPower);
        match build_ladder(&cfg, &unit_coeffs()) {
            Err(Error::LadderOverflow { scale: 8, .. }) => {}
            other => panic!("expected overflow at scale 8, got {other:?}"),
        }
    }

    #[test]
    fn log_power_large_start() {
        // N1 = ceil(e^20): floor(ln N1) = 20, floor(ln ln N1) = 2.
        let cfg = config(485_165_196, 2, LadderMode::LogPower);
        let ladder = build_ladder(&cfg, &unit_coeffs()).unwrap();
        assert_eq!(ladder.m, vec![400]);
        assert_eq!(ladder.n[1], 485_165_196 * 400);
    }

    #[test]
    fn log_power_stalls_at_8() {
        // floor(ln ln 8) = 0, so the step ratio is 2^0 = 1: degenerate.
        let cfg = config(8, 2, LadderMode::LogPower);
        match build_ladder(&cfg, &unit_coeffs()) {
            Err(Error::DegenerateStep { scale: 2, .. }) => {}
            other => panic!("expected degenerate step, got {other:?}"),
        }
    }

    #[test]
    fn rejects_small_n1_and_shallow_depth() {
        assert!(build_ladder(&config(7, 3, LadderMode::Geometric { ratio: 8 }), &unit_coeffs()).is_err());
        assert!(build_ladder(&config(16, 1, LadderMode::Geometric { ratio: 8 }), &unit_coeffs()).is_err());
        assert!(build_ladder(&config(16, 3, LadderMode::Geometric { ratio: 1 }), &unit_coeffs()).is_err());
    }

    #[test]
    fn delta_combines_log_floor_and_tail() {
        let ladder = build_ladder(
            &config(16, 4, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        assert!(ladder.delta_at(1).is_infinite());
        // Tail envelope 1/N_k is negligible here; the (ln k)^{-1/2} branch wins.
        assert!((ladder.delta_at(2) - 1.201_122_408_786_449_8).abs() < 1e-12);
        assert!((ladder.delta_at(3) - 0.954_064_582_000_001_3).abs() < 1e-12);
        // Four-decimal published rounding of the same value.
        assert!((ladder.delta_at(3) - 0.9539).abs() < 2e-3);

        // A table with a spike at n = 1024 makes the tail branch win instead:
        // sup n^{-1/2} |a_n| = 40 / sqrt(1024) = 1.25 > (ln 3)^{-1/2}.
        let mut values: Vec<num_complex::Complex64> = (1..=1024u64)
            .map(|n| num_complex::Complex64::new(1.0 / (n as f64).sqrt(), 0.0))
            .collect();
        values[1023] = num_complex::Complex64::new(40.0, 0.0);
        let heavy = CoefficientModel::Table { values };
        let ladder2 =
            build_ladder(&config(16, 3, LadderMode::Geometric { ratio: 8 }), &heavy).unwrap();
        assert_eq!(ladder2.delta_at(3), 1.25);
    }

    #[test]
    fn delta_nonincreasing_for_unit_scaled_sqrt() {
        let ladder = build_ladder(
            &config(16, 6, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        for k in 2..=ladder.depth() {
            assert!(ladder.delta_at(k) <= ladder.delta_at(k - 1));
        }
    }

    #[test]
    fn table_must_cover_top_scale() {
        let short = CoefficientModel::Table {
            values: vec![num_complex::Complex64::new(1.0, 0.0); 100],
        };
        match build_ladder(&config(16, 3, LadderMode::Geometric { ratio: 8 }), &short) {
            Err(Error::TableTooShort { needed, have }) => {
                assert_eq!(needed, 1024);
                assert_eq!(have, 100);
            }
            other => panic!("expected table-too-short, got {other:?}"),
        }
    }

    // Frozen grid from the reference construction: 100 -> 200 at eta = 0.1.
    #[test]
    fn grid_100_to_200() {
        let g = subscale_grid(100, 200, 0.1).unwrap();
        assert_eq!(g.points, vec![100, 115, 132, 152, 174, 200]);
        assert_eq!(g.ell(), 5);
        assert!(g.ell() >= 4 && g.ell() <= 8);
        for w in g.points.windows(2) {
            let r = w[1] as f64 / w[0] as f64;
            assert!((1.1..=1.2).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn grid_rejects_empty_and_too_tight() {
        assert!(matches!(
            subscale_grid(100, 100, 0.1),
            Err(Error::GridTooTight { .. })
        ));
        assert!(matches!(
            subscale_grid(100, 104, 0.1),
            Err(Error::GridTooTight { .. })
        ));
    }

    #[test]
    fn grid_telescopes_and_respects_ratios_on_desk_ladder() {
        let ladder = build_ladder(
            &config(16, 6, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        for k in 1..ladder.depth() {
            let g = ladder.grid(k);
            assert_eq!(g.points[0], ladder.n_at(k));
            assert_eq!(*g.points.last().unwrap(), ladder.n_at(k + 1));
            let span: u64 = g.blocks().map(|(a, b)| b - a).sum();
            assert_eq!(span, ladder.n_at(k + 1) - ladder.n_at(k));
            for (i, w) in g.points.windows(2).enumerate() {
                let r = w[1] as f64 / w[0] as f64;
                assert!(r >= 1.0 + g.eta, "block {i} ratio {r} below window");
                if i + 2 < g.points.len() {
                    assert!(r <= 1.0 + 2.0 * g.eta + 1e-12, "block {i} ratio {r} above window");
                }
            }
        }
    }

    #[test]
    fn reconstruction_product() {
        let cfg = config(1000, 7, LadderMode::LogPower);
        let ladder = build_ladder(&cfg, &unit_coeffs()).unwrap();
        let prod: u64 = ladder.m.iter().product();
        assert_eq!(ladder.n[0] * prod, *ladder.n.last().unwrap());
    }

    #[test]
    fn serialization_maps_infinite_delta_to_null() {
        let ladder = build_ladder(
            &config(16, 3, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&ladder.to_json()).unwrap();
        assert!(v["delta"][0].is_null());
        assert!(v["delta"][1].is_number());
        assert_eq!(v["N"][0], 16);
        assert_eq!(v["M"][0], 8);
        assert!(v["subscales"][0]["points"].is_array());
    }

    #[test]
    fn warnings_flag_slow_growth() {
        let ladder = build_ladder(
            &config(1 << 20, 3, LadderMode::Geometric { ratio: 2 }),
            &unit_coeffs(),
        )
        .unwrap();
        // ratio 2 < ln(2^20) ~ 13.9 at every step.
        assert_eq!(ladder.warnings().len(), 2);
        // From e^20 the step ratio 400 clears ln N1 = 20 comfortably; the
        // step from 1000 (ratio 6 < ln 1000) keeps one advisory.
        let honest = build_ladder(&config(485_165_196, 2, LadderMode::LogPower), &unit_coeffs()).unwrap();
        assert!(honest.warnings().is_empty());
        let slow_start = build_ladder(&config(1000, 2, LadderMode::LogPower), &unit_coeffs()).unwrap();
        assert_eq!(slow_start.warnings().len(), 1);
    }

    #[test]
    fn child_windows_fit_inside_steps() {
        let ladder = build_ladder(
            &config(16, 6, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        for k in 2..=ladder.depth() {
            let w = ladder.child_window(k);
            assert!(2 * w + 1 <= ladder.m_at(k));
            let expected = (ladder.m_at(k) as f64
                * (ladder.n_at(k - 1) as f64).ln().powf(-1.0))
            .floor() as u64;
            assert_eq!(w, expected);
        }
    }

    #[test]
    fn content_hash_is_stable_and_input_sensitive() {
        let a = build_ladder(
            &config(16, 3, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        let b = build_ladder(
            &config(16, 3, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        let c = build_ladder(
            &config(16, 4, LadderMode::Geometric { ratio: 8 }),
            &unit_coeffs(),
        )
        .unwrap();
        assert_eq!(a.content_hash64(), b.content_hash64());
        assert_ne!(a.content_hash64(), c.content_hash64());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn grid_invariants_hold_generally(
            lo in 50u64..5000,
            mult in 2u64..16,
            beta in 0.25f64..2.0,
        ) {
            let hi = lo * mult;
            let eta = (lo as f64).ln().powf(-beta);
            if let Ok(g) = subscale_grid(lo, hi, eta) {
                prop_assert_eq!(g.points[0], lo);
                prop_assert_eq!(*g.points.last().unwrap(), hi);
                for w in g.points.windows(2) {
                    prop_assert!(w[1] > w[0]);
                    prop_assert!(w[1] as f64 / w[0] as f64 >= 1.0 + eta);
                }
                for w in g.points.windows(2).take(g.points.len().saturating_sub(2)) {
                    prop_assert!(w[1] as f64 / w[0] as f64 <= 1.0 + 2.0 * eta + 1e-12);
                }
            }
        }

        #[test]
        fn geometric_ladders_reconstruct(
            n1 in 8u64..64,
            ratio in 2u64..10,
            depth in 2usize..6,
        ) {
            let cfg = config(n1, depth, LadderMode::Geometric { ratio });
            if let Ok(ladder) = build_ladder(&cfg, &unit_coeffs()) {
                let prod: u64 = ladder.m.iter().product();
                prop_assert_eq!(ladder.n[0] * prod, *ladder.n.last().unwrap());
                prop_assert_eq!(ladder.subscales.len(), depth - 1);
            }
        }
    }
}
