//! Rare-event frequencies over a transition block, scanned exhaustively
//! over net points and within-block prefix positions, next to their
//! union-bound predictions. The first event tracks raw within-block
//! oscillation against `(ln N_k)^-2`; the second tracks derivative-weighted
//! sums against `N_{k+1} ln N_{k+1}`.

use super::{seed_labels, MCEstimate};
use crate::coeffs::CoefficientModel;
use crate::error::{Error, Result};
use crate::ladder::ScaleLadder;
use crate::noise::{derive_seed, NoiseStream, StreamId};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct EventReport {
    pub estimate: MCEstimate,
    pub threshold: f64,
    /// Sub-Gaussian tail bound summed over points and sub-blocks, clamped
    /// to 1: `min(1, points * sum_j 4 exp(-t^2 / (4 V_j)))`.
    pub union_bound: f64,
}

fn scan_frequency(
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    k: usize,
    trials: u64,
    master_seed: u64,
    cap: u64,
    threshold: f64,
    derivative: bool,
) -> Result<EventReport> {
    if !(1..ladder.depth()).contains(&k) {
        return Err(Error::ScaleOutOfRange {
            index: k,
            depth: ladder.depth(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let lo = ladder.n_at(k);
    let hi = ladder.n_at(k + 1);
    let fine_n = hi;
    let len = hi - lo;
    if fine_n.saturating_mul(len) > cap {
        return Err(Error::InvalidParameter(format!(
            "scan size {} x {} exceeds cap {cap}",
            fine_n, len
        )));
    }
    let grid = ladder.grid(k);
    let weights: Vec<f64> = (lo..hi)
        .map(|n| {
            let a = coeffs.amp(n);
            if derivative {
                n as f64 * a
            } else {
                a
            }
        })
        .collect();
    let phases: Vec<Complex64> = (0..fine_n)
        .map(|s| Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / fine_n as f64))
        .collect();
    let boundaries: Vec<u64> = grid.points.clone();

    let mut union = 0.0f64;
    for (blo, bhi) in grid.blocks() {
        let v: f64 = (blo..bhi)
            .map(|n| {
                let w = weights[(n - lo) as usize];
                w * w
            })
            .sum();
        if v > 0.0 {
            union += 4.0 * (-threshold * threshold / (4.0 * v)).exp();
        }
    }
    let union_bound = (fine_n as f64 * union).min(1.0);

    let mut successes = 0u64;
    let mut signs = vec![0.0f64; len as usize];
    for trial in 0..trials {
        let stream = NoiseStream::new(
            derive_seed(master_seed, seed_labels::EVENTS, trial),
            StreamId::Rademacher,
        );
        for (t, s) in signs.iter_mut().enumerate() {
            *s = stream.sign_at(lo + t as u64);
        }
        let mut exceeded = false;
        'points: for t in 1..=fine_n {
            let mut p = (lo * t) % fine_n;
            let mut next_boundary = 1usize;
            let mut sum = Complex64::new(0.0, 0.0);
            for n in lo..hi {
                if n >= boundaries[next_boundary] {
                    next_boundary += 1;
                    sum = Complex64::new(0.0, 0.0);
                }
                let idx = (n - lo) as usize;
                sum += signs[idx] * weights[idx] * phases[p as usize];
                p += t;
                if p >= fine_n {
                    p -= fine_n;
                }
                if sum.norm_sqr() > threshold * threshold {
                    exceeded = true;
                    break 'points;
                }
            }
        }
        successes += exceeded as u64;
    }
    Ok(EventReport {
        estimate: MCEstimate::from_bernoulli(successes, trials, master_seed),
        threshold,
        union_bound,
    })
}

/// Frequency of some within-block prefix at some net point exceeding the
/// oscillation threshold, default `(ln N_k)^-2`.
pub fn event_e1_frequency(
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    k: usize,
    trials: u64,
    master_seed: u64,
    cap: u64,
    threshold_override: Option<f64>,
) -> Result<EventReport> {
    let threshold =
        threshold_override.unwrap_or_else(|| (ladder.n_at(k) as f64).ln().powi(-2));
    scan_frequency(
        ladder, coeffs, k, trials, master_seed, cap, threshold, false,
    )
}

/// Frequency of some derivative-weighted within-block prefix exceeding the
/// growth threshold, default `N_{k+1} ln N_{k+1}`.
pub fn event_e2_frequency(
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    k: usize,
    trials: u64,
    master_seed: u64,
    cap: u64,
    threshold_override: Option<f64>,
) -> Result<EventReport> {
    let threshold = threshold_override.unwrap_or_else(|| {
        let n = ladder.n_at(k + 1) as f64;
        n * n.ln()
    });
    scan_frequency(ladder, coeffs, k, trials, master_seed, cap, threshold, true)
}
