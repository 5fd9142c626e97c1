//! Frequency of the one-point containment event at a fixed angle: the
//! checkpoint prefixes of the transition block stay under the sup
//! threshold and the block endpoint lands under the endpoint threshold.
//! Sign multipliers give the primary estimate; the same trial streams
//! drive a Gaussian run for comparison, and trial seeds depend only on the
//! master seed and trial index, so sweeps over coefficient scales share
//! their randomness.

use super::{seed_labels, MCEstimate};
use crate::coeffs::CoefficientModel;
use crate::error::{Error, Result};
use crate::goodness::ThresholdFamily;
use crate::ladder::ScaleLadder;
use crate::noise::{derive_seed, NoiseStream, StreamId};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct OnePointReport {
    pub rademacher: MCEstimate,
    pub gaussian: MCEstimate,
    pub sup_threshold: f64,
    pub end_threshold: f64,
}

pub fn one_point_probability_mc(
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    k: usize,
    z_theta: f64,
    trials: u64,
    thresholds: &ThresholdFamily,
    master_seed: u64,
) -> Result<OnePointReport> {
    if !(2..=ladder.depth()).contains(&k) {
        return Err(Error::ScaleOutOfRange {
            index: k,
            depth: ladder.depth(),
        });
    }
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "one-point estimate needs >= 1000 trials, got {trials}"
        )));
    }
    let sup_threshold = thresholds.sup_threshold(ladder.delta_at(k - 1));
    let end_threshold = thresholds.end_threshold(k);
    let lo = ladder.n_at(k - 1);
    let hi = ladder.n_at(k);
    let grid = ladder.grid(k - 1);
    let step = Complex64::from_polar(1.0, std::f64::consts::TAU * z_theta);
    let start = lo as f64 * z_theta;
    let mut w = Complex64::from_polar(1.0, std::f64::consts::TAU * (start - start.floor()));
    let terms: Vec<Complex64> = (lo..hi)
        .map(|n| {
            let out = coeffs.coeff_unchecked(n) * w;
            w *= step;
            out
        })
        .collect();
    let rows: Vec<(usize, usize)> = grid
        .blocks()
        .map(|(a, b)| ((a - lo) as usize, (b - lo) as usize))
        .collect();

    let run = |id: StreamId| -> u64 {
        let mut successes = 0u64;
        for trial in 0..trials {
            let stream = NoiseStream::new(
                derive_seed(master_seed, seed_labels::ONE_POINT, trial),
                id,
            );
            let mut prefix = Complex64::new(0.0, 0.0);
            let mut sup = 0.0f64;
            for &(a, b) in &rows {
                let mut row = Complex64::new(0.0, 0.0);
                for (t, term) in terms[a..b].iter().enumerate() {
                    let n = lo + (a + t) as u64;
                    let xi = match id {
                        StreamId::Gaussian => stream.gaussian_at(n),
                        _ => stream.sign_at(n),
                    };
                    row += xi * term;
                }
                prefix += row;
                sup = sup.max(prefix.norm());
            }
            if sup <= sup_threshold && prefix.norm() <= end_threshold {
                successes += 1;
            }
        }
        successes
    };

    let rademacher = MCEstimate::from_bernoulli(run(StreamId::Rademacher), trials, master_seed);
    let gaussian = MCEstimate::from_bernoulli(run(StreamId::Gaussian), trials, master_seed);
    Ok(OnePointReport {
        rademacher,
        gaussian,
        sup_threshold,
        end_threshold,
    })
}
