//! Good-point selection: hard threshold masks over prefix envelopes and the
//! smoothed score used by moment arguments.
//!
//! A net point of scale `k` is good when its running-prefix sup and its
//! endpoint both clear scale-dependent thresholds. Comparisons are closed
//! (`<=`), and the sup threshold is driven by the previous scale's decay
//! parameter, so at `k = 2` (where `delta_1` is infinite) the sup condition
//! is vacuous for the standard family.

use crate::kahan::KahanComplex;
use crate::sums::{slot_of, PartialSumTable, PrefixEnvelope};
use crate::window::window_radial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Threshold shape: sup bound `sup_coeff * delta_prev^sup_exponent`, endpoint
/// bound `end_coeff * k^{-2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFamily {
    pub sup_coeff: f64,
    pub sup_exponent: f64,
    pub end_coeff: f64,
}

impl ThresholdFamily {
    /// Construction default: sup bound `3 sqrt(delta_prev)`, endpoint bound
    /// `3 k^{-2}`.
    pub fn standard() -> Self {
        Self {
            sup_coeff: 3.0,
            sup_exponent: 0.5,
            end_coeff: 3.0,
        }
    }

    /// Tight variant used by single-point probability estimates.
    pub fn one_point() -> Self {
        Self {
            sup_coeff: 1.0,
            sup_exponent: 0.5,
            end_coeff: 3.0,
        }
    }

    /// Scale-free sup level `level` at every scale. Exponent zero makes the
    /// level apply even at `k = 2`: IEEE `inf^0 = 1`.
    pub fn constant_sup(level: f64) -> Self {
        Self {
            sup_coeff: level,
            sup_exponent: 0.0,
            end_coeff: 3.0,
        }
    }

    pub fn sup_threshold(&self, delta_prev: f64) -> f64 {
        self.sup_coeff * delta_prev.powf(self.sup_exponent)
    }

    pub fn end_threshold(&self, scale: usize) -> f64 {
        self.end_coeff * (scale as f64).powi(-2)
    }
}

/// Named threshold selection for configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GoodMode {
    Standard,
    OnePoint,
    ConstantSup { level: f64 },
}

impl GoodMode {
    pub fn family(&self) -> ThresholdFamily {
        match *self {
            GoodMode::Standard => ThresholdFamily::standard(),
            GoodMode::OnePoint => ThresholdFamily::one_point(),
            GoodMode::ConstantSup { level } => ThresholdFamily::constant_sup(level),
        }
    }
}

/// Slot-indexed good mask for one scale's net.
#[derive(Clone, Debug)]
pub struct GoodMask {
    pub scale: usize,
    pub net_n: u64,
    pub mask: Vec<bool>,
}

impl GoodMask {
    /// Membership of net index `t in 1..=N`.
    pub fn at(&self, t: u64) -> bool {
        self.mask[slot_of(t, self.net_n)]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Slots of the good points, ascending.
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(s, &b)| b.then_some(s))
    }
}

/// Hard mask: `sup <= sup_coeff * delta_prev^exp` and
/// `endpoint <= end_coeff * k^{-2}`, both closed.
pub fn good_mask(env: &PrefixEnvelope, delta_prev: f64, family: &ThresholdFamily) -> GoodMask {
    let sup_thr = family.sup_threshold(delta_prev);
    let end_thr = family.end_threshold(env.scale);
    let mask: Vec<bool> = env
        .sup
        .iter()
        .zip(&env.endpoint)
        .map(|(&s, &e)| s <= sup_thr && e <= end_thr)
        .collect();
    GoodMask {
        scale: env.scale,
        net_n: env.net_n,
        mask,
    }
}

/// Smoothed good score of one point from its column of block values:
/// `H(k^2 |endpoint|) * prod_j H(delta^{-1/4} |prefix_j|)` with the smooth
/// cutoff `H` (1 below 1, 0 above 2). Sandwiched between the indicators of
/// the tight region (all prefixes `<= delta^{1/4}`, endpoint `<= k^{-2}`)
/// and the doubled region.
pub fn soft_good_score(column: &[Complex64], scale: usize, delta: f64) -> f64 {
    let inv_quarter = delta.powf(-0.25);
    let k2 = (scale as f64) * (scale as f64);
    let mut run = KahanComplex::new();
    let mut score = 1.0f64;
    for &w in column {
        run.add(w);
        score *= window_radial(inv_quarter * run.value().norm());
        if score == 0.0 {
            return 0.0;
        }
    }
    score * window_radial(k2 * run.value().norm())
}

/// Sum of smoothed scores over candidate slots of a block-sum table.
pub fn branching_statistic(table: &PartialSumTable, slots: &[usize], delta: f64) -> f64 {
    slots
        .iter()
        .map(|&s| soft_good_score(&table.column(s), table.scale, delta))
        .sum()
}
