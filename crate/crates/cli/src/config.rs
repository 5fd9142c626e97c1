//! The single JSON configuration document.
//!
//! One file drives every subcommand; unknown keys are rejected so a typo
//! cannot silently fall back to a default. Every default is materialized on
//! load and echoed into the manifest, never left implicit.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rpslab_core::coeffs::CoefficientModel;
use rpslab_core::goodness::GoodMode;
use rpslab_core::ladder::LadderConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ladder: LadderConfig,
    pub coefficients: CoefficientModel,
    #[serde(default)]
    pub good: GoodParams,
    /// Master seed; overridden by `RPSLAB_SEED` and the `--seed` flag.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory; overridden by the `--out` flag.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub diagnose: Option<DiagnoseConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub dimension: Option<DimensionConfig>,
}

/// Good-point thresholds and the mass-distribution exponent.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodParams {
    #[serde(default = "default_thresholds")]
    pub thresholds: GoodMode,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_thresholds() -> GoodMode {
    GoodMode::Standard
}

fn default_tau() -> f64 {
    0.95
}

impl Default for GoodParams {
    fn default() -> Self {
        Self {
            thresholds: default_thresholds(),
            tau: default_tau(),
        }
    }
}

/// Resource ceilings. Work that would exceed a cap fails fast instead of
/// thrashing.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Total bytes of per-point evaluation state across all scales.
    #[serde(default = "default_max_eval_bytes")]
    pub max_eval_bytes: u64,
    /// Largest point count a brute-force scan may visit.
    #[serde(default = "default_max_subset")]
    pub max_subset: u64,
    /// Ceiling on any Monte Carlo trial or path count.
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
}

fn default_max_eval_bytes() -> u64 {
    2 << 30
}

fn default_max_subset() -> u64 {
    20_000_000
}

fn default_max_trials() -> u64 {
    100_000_000
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_eval_bytes: default_max_eval_bytes(),
            max_subset: default_max_subset(),
            max_trials: default_max_trials(),
        }
    }
}

/// Parameters for the `diagnose` subcommand. `selectors` names the checks to
/// run, in order; everything else tunes their budgets.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    #[serde(default)]
    pub selectors: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_sieve_instances")]
    pub sieve_instances: u64,
    #[serde(default = "default_ball_paths")]
    pub ball_paths: u64,
    #[serde(default = "default_ball_steps")]
    pub ball_steps: u32,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_correlation_points")]
    pub correlation_points: u64,
    #[serde(default = "default_correlation_scale")]
    pub correlation_scale: usize,
    #[serde(default = "default_onepoint_scale")]
    pub onepoint_scale: usize,
    #[serde(default = "default_event_scale")]
    pub event_scale: usize,
    /// Override for the block-sum tail threshold (default `(ln N_k)^-2`).
    #[serde(default)]
    pub e1_threshold: Option<f64>,
    /// Override for the derivative tail threshold (default `N_{k+1} ln N_{k+1}`).
    #[serde(default)]
    pub e2_threshold: Option<f64>,
    #[serde(default = "default_gci_pairs")]
    pub gci_pairs: u64,
    #[serde(default = "default_lindeberg_instances")]
    pub lindeberg_instances: u64,
    #[serde(default = "default_stay_n0")]
    pub stay_n0: u64,
    #[serde(default = "default_stay_eps")]
    pub stay_eps: f64,
    #[serde(default = "default_stay_deltas")]
    pub stay_deltas: Vec<f64>,
    /// Soft wall-clock budget; exceeding it is recorded, not fatal.
    #[serde(default)]
    pub time_cap_ms: Option<u64>,
}

fn default_trials() -> u64 {
    2000
}
fn default_sieve_instances() -> u64 {
    100
}
fn default_ball_paths() -> u64 {
    20_000
}
fn default_ball_steps() -> u32 {
    400
}
fn default_rho() -> f64 {
    0.005
}
fn default_correlation_points() -> u64 {
    48
}
fn default_correlation_scale() -> usize {
    1
}
fn default_onepoint_scale() -> usize {
    3
}
fn default_event_scale() -> usize {
    1
}
fn default_gci_pairs() -> u64 {
    24
}
fn default_lindeberg_instances() -> u64 {
    8
}
fn default_stay_n0() -> u64 {
    100
}
fn default_stay_eps() -> f64 {
    0.25
}
fn default_stay_deltas() -> Vec<f64> {
    vec![0.1, 0.2, 0.4, 1.0]
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty diagnose config deserializes")
    }
}

/// Parameters for the `sweep` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Delta0,
    Tau,
    BetaChild,
    N1,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Delta0 => "delta0",
            SweepVariable::Tau => "tau",
            SweepVariable::BetaChild => "beta_child",
            SweepVariable::N1 => "n1",
        }
    }
}

/// Box-counting grid for the `dimension` subcommand: dyadic cell sizes
/// `2^-eps_from .. 2^-eps_to`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionConfig {
    #[serde(default = "default_eps_from")]
    pub eps_from: u32,
    #[serde(default = "default_eps_to")]
    pub eps_to: u32,
}

fn default_eps_from() -> u32 {
    4
}
fn default_eps_to() -> u32 {
    12
}

impl Default for DimensionConfig {
    fn default() -> Self {
        Self {
            eps_from: default_eps_from(),
            eps_to: default_eps_to(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.ladder.validate()?;
        self.coefficients.validate()?;
        if !(0.0..=1.0).contains(&self.good.tau) {
            bail!("good.tau must lie in [0, 1], got {}", self.good.tau);
        }
        if let GoodMode::ConstantSup { level } = self.good.thresholds {
            if !level.is_finite() || level < 0.0 {
                bail!("constant_sup level must be finite and >= 0, got {level}");
            }
        }
        if self.caps.max_eval_bytes == 0 || self.caps.max_subset == 0 || self.caps.max_trials == 0
        {
            bail!("caps must be positive");
        }
        if let Some(dc) = &self.diagnose {
            for t in [dc.trials, dc.ball_paths] {
                if t > self.caps.max_trials {
                    bail!("diagnose trial count {t} exceeds caps.max_trials");
                }
            }
            if !dc.rho.is_finite() || dc.rho <= 0.0 {
                bail!("diagnose.rho must be finite and > 0, got {}", dc.rho);
            }
            if dc.stay_deltas.is_empty() {
                bail!("diagnose.stay_deltas must be nonempty");
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.values.len() < 2 {
                bail!("sweep needs at least 2 values, got {}", sw.values.len());
            }
            if sw.seeds.len() < 3 {
                bail!("sweep needs at least 3 seeds, got {}", sw.seeds.len());
            }
            let mut sorted = sw.values.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sweep values"));
            sorted.dedup();
            if sorted.len() != sw.values.len() {
                bail!("sweep values must be distinct");
            }
            for &v in &sw.values {
                check_sweep_value(sw.variable, v)?;
            }
        }
        if let Some(dim) = &self.dimension {
            if dim.eps_from >= dim.eps_to {
                bail!(
                    "dimension grid needs eps_from < eps_to, got {} >= {}",
                    dim.eps_from,
                    dim.eps_to
                );
            }
            if dim.eps_to > 40 {
                bail!("dimension eps_to {} exceeds 40", dim.eps_to);
            }
        }
        Ok(())
    }

    /// The config with `variable` set to `value`, for one sweep cell.
    pub fn with_sweep_value(&self, variable: SweepVariable, value: f64) -> anyhow::Result<Self> {
        let mut cfg = self.clone();
        match variable {
            SweepVariable::Delta0 => match &mut cfg.coefficients {
                CoefficientModel::ScaledSqrt { delta0 } => *delta0 = value,
                other => bail!(
                    "delta0 sweep needs the scaled_sqrt coefficient model, got {other:?}"
                ),
            },
            SweepVariable::Tau => cfg.good.tau = value,
            SweepVariable::BetaChild => cfg.ladder.beta_child = value,
            SweepVariable::N1 => cfg.ladder.n1 = value as u64,
        }
        cfg.sweep = None;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_sweep_value(variable: SweepVariable, v: f64) -> anyhow::Result<()> {
    if !v.is_finite() {
        bail!("sweep value {v} is not finite");
    }
    match variable {
        SweepVariable::Delta0 => {
            if v < 0.0 {
                bail!("delta0 sweep value {v} must be >= 0");
            }
        }
        SweepVariable::Tau => {
            if !(0.0..=1.0).contains(&v) {
                bail!("tau sweep value {v} must lie in [0, 1]");
            }
        }
        SweepVariable::BetaChild => {
            if v <= 0.0 {
                bail!("beta_child sweep value {v} must be > 0");
            }
        }
        SweepVariable::N1 => {
            if v.fract() != 0.0 || v < 8.0 {
                bail!("n1 sweep value {v} must be an integer >= 8");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> &'static str {
        r#"{
            "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4}},
            "coefficients": {"model": "scaled_sqrt", "delta0": 0.1}
        }"#
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.good.thresholds, GoodMode::Standard);
        assert_eq!(cfg.good.tau, 0.95);
        assert_eq!(cfg.caps.max_trials, 100_000_000);
        assert!(cfg.seed.is_none());
        assert!(cfg.diagnose.is_none());
        let echo = serde_json::to_value(&cfg).unwrap();
        assert_eq!(echo["good"]["tau"], 0.95);
        assert_eq!(echo["caps"]["max_subset"], 20_000_000);
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        let top = r#"{
            "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4}},
            "coefficients": {"model": "scaled_sqrt", "delta0": 0.1},
            "surprise": 1
        }"#;
        assert!(serde_json::from_str::<RunConfig>(top).is_err());
        let nested = r#"{
            "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4}, "bogus": 2},
            "coefficients": {"model": "scaled_sqrt", "delta0": 0.1}
        }"#;
        assert!(serde_json::from_str::<RunConfig>(nested).is_err());
        let good = r#"{
            "ladder": {"n1": 16, "depth": 3, "mode": {"kind": "geometric", "ratio": 4}},
            "coefficients": {"model": "scaled_sqrt", "delta0": 0.1},
            "good": {"tau": 0.5, "extra": true}
        }"#;
        assert!(serde_json::from_str::<RunConfig>(good).is_err());
    }

    #[test]
    fn sweep_preconditions_enforced() {
        let mut cfg: RunConfig = serde_json::from_str(minimal_json()).unwrap();
        cfg.sweep = Some(SweepConfig {
            variable: SweepVariable::Delta0,
            values: vec![0.1],
            seeds: vec![1, 2, 3],
        });
        assert!(cfg.validate().is_err());
        cfg.sweep = Some(SweepConfig {
            variable: SweepVariable::Delta0,
            values: vec![0.1, 0.4],
            seeds: vec![1, 2],
        });
        assert!(cfg.validate().is_err());
        cfg.sweep = Some(SweepConfig {
            variable: SweepVariable::N1,
            values: vec![16.0, 12.5],
            seeds: vec![1, 2, 3],
        });
        assert!(cfg.validate().is_err());
        cfg.sweep = Some(SweepConfig {
            variable: SweepVariable::Delta0,
            values: vec![0.1, 0.4],
            seeds: vec![1, 2, 3],
        });
        cfg.validate().unwrap();
    }

    #[test]
    fn sweep_value_application() {
        let cfg: RunConfig = serde_json::from_str(minimal_json()).unwrap();
        let cell = cfg.with_sweep_value(SweepVariable::Delta0, 0.7).unwrap();
        assert_eq!(
            cell.coefficients,
            CoefficientModel::ScaledSqrt { delta0: 0.7 }
        );
        let cell = cfg.with_sweep_value(SweepVariable::N1, 32.0).unwrap();
        assert_eq!(cell.ladder.n1, 32);
        let mut powerlaw = cfg.clone();
        powerlaw.coefficients = CoefficientModel::PowerLaw { alpha: 0.5 };
        assert!(powerlaw.with_sweep_value(SweepVariable::Delta0, 0.7).is_err());
    }

    #[test]
    fn tau_range_checked() {
        let mut cfg: RunConfig = serde_json::from_str(minimal_json()).unwrap();
        cfg.good.tau = 1.5;
        assert!(cfg.validate().is_err());
    }
}
