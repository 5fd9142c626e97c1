//! Probability that a standard Brownian path stays inside `[-a, a]` up to
//! time 1. The reflection series gives the exact value; the Monte Carlo
//! mode simulates discrete paths with inter-step bridge crossing weights,
//! which removes the discrete-maximum bias that plain max-of-grid
//! estimation suffers (tens of percent at small `a`).

use super::{seed_labels, MCEstimate};
use crate::error::{Error, Result};
use crate::kahan::Kahan;
use crate::noise::{derive_seed, NoiseStream, StreamId};

/// `(4/pi) sum_k (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 / (8 a^2))`, truncated
/// once terms drop below 1e-16 in absolute value.
pub fn small_ball_series(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "barrier {a} must be positive"
        )));
    }
    let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * a * a);
    let lead = 4.0 / std::f64::consts::PI;
    let mut acc = Kahan::new();
    let mut k = 0u64;
    loop {
        let odd = (2 * k + 1) as f64;
        let term = lead * (if k % 2 == 0 { 1.0 } else { -1.0 }) / odd * (-c * odd * odd).exp();
        if term.abs() < 1e-16 {
            break;
        }
        acc.add(term);
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

/// Discrete-path estimate with Brownian-bridge two-barrier crossing
/// weights: a surviving step multiplies the weight by the probability that
/// the bridge between consecutive grid values avoided both barriers.
pub fn small_ball_mc(a: f64, steps: u32, paths: u64, master_seed: u64) -> Result<MCEstimate> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "barrier {a} must be positive"
        )));
    }
    if steps == 0 || paths == 0 {
        return Err(Error::InvalidParameter(
            "steps and paths must be positive".into(),
        ));
    }
    let dt = 1.0 / steps as f64;
    let sqrt_dt = dt.sqrt();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for path in 0..paths {
        let stream = NoiseStream::new(
            derive_seed(master_seed, seed_labels::SMALL_BALL, path),
            StreamId::Gaussian,
        );
        let mut x = 0.0f64;
        let mut w = 1.0f64;
        // Both Box-Muller branches get used, halving the per-step cost.
        let mut pair_idx = 0u64;
        let mut spare: Option<f64> = None;
        for _ in 0..steps {
            let g = match spare.take() {
                Some(g) => g,
                None => {
                    pair_idx += 1;
                    let (g0, g1) = stream.gaussian_pair_at(pair_idx);
                    spare = Some(g1);
                    g0
                }
            };
            let y = x + sqrt_dt * g;
            if y.abs() >= a {
                w = 0.0;
                break;
            }
            let up = 2.0 * (a - x) * (a - y) / dt;
            if up < 20.0 {
                w *= 1.0 - (-up).exp();
            }
            let down = 2.0 * (a + x) * (a + y) / dt;
            if down < 20.0 {
                w *= 1.0 - (-down).exp();
            }
            x = y;
        }
        sum += w;
        sum_sq += w * w;
    }
    Ok(MCEstimate::from_weights(sum, sum_sq, paths, master_seed))
}
