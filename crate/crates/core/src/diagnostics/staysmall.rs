//! The stay-small contrast experiment at a fixed angle: frequency that the
//! running sum of `xi_n a_n e(n theta)` over `n in [N, N^2]` never leaves
//! the disc of radius `eps`. Smaller coefficient scales should keep the
//! walk inside far more often; the acceptance gate compares scales at
//! matched trial seeds.

use super::{seed_labels, MCEstimate};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, NoiseStream, StreamId};
use num_complex::Complex64;

/// The fixed evaluation angle: the golden ratio conjugate, far from small
/// rationals so the rotation orbit equidistributes quickly.
pub const STAY_SMALL_THETA: f64 = 0.618_033_988_749_894_9;

pub fn stay_small_probability_mc(
    n0: u64,
    eps: f64,
    delta0: f64,
    trials: u64,
    master_seed: u64,
) -> Result<MCEstimate> {
    if n0 < 2 {
        return Err(Error::InvalidParameter(format!(
            "block start {n0} must be >= 2"
        )));
    }
    if !(eps >= 0.0) || !(delta0 >= 0.0) {
        return Err(Error::InvalidParameter(
            "eps and delta0 must be nonnegative".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let hi = n0 * n0;
    let step = Complex64::from_polar(1.0, std::f64::consts::TAU * STAY_SMALL_THETA);
    let start = n0 as f64 * STAY_SMALL_THETA;
    let mut w = Complex64::from_polar(1.0, std::f64::consts::TAU * (start - start.floor()));
    let terms: Vec<Complex64> = (n0..=hi)
        .map(|n| {
            let out = delta0 / (n as f64).sqrt() * w;
            w *= step;
            out
        })
        .collect();
    let mut successes = 0u64;
    for trial in 0..trials {
        let stream = NoiseStream::new(
            derive_seed(master_seed, seed_labels::STAY_SMALL, trial),
            StreamId::Rademacher,
        );
        let mut sum = Complex64::new(0.0, 0.0);
        let mut inside = true;
        for (t, term) in terms.iter().enumerate() {
            sum += stream.sign_at(n0 + t as u64) * term;
            if sum.norm_sqr() > eps * eps {
                inside = false;
                break;
            }
        }
        if inside {
            successes += 1;
        }
    }
    Ok(MCEstimate::from_bernoulli(successes, trials, master_seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generous_radius_is_certain() {
        // Total block mass <= delta0 * sum n^-1/2 over [4, 16]; eps above
        // that cannot be breached.
        let mass: f64 = (4..=16u64).map(|n| 0.2 / (n as f64).sqrt()).sum();
        let rep = stay_small_probability_mc(4, mass + 0.01, 0.2, 500, 11).unwrap();
        assert_eq!(rep.estimate, 1.0);
    }

    #[test]
    fn zero_radius_is_impossible() {
        let rep = stay_small_probability_mc(4, 0.0, 0.2, 500, 11).unwrap();
        assert_eq!(rep.estimate, 0.0);
        // Zero coefficients stay at the origin, which the closed event
        // still counts.
        let rep = stay_small_probability_mc(4, 0.0, 0.0, 500, 11).unwrap();
        assert_eq!(rep.estimate, 1.0);
    }

    #[test]
    fn small_scale_beats_large_scale() {
        let small = stay_small_probability_mc(100, 0.25, 0.1, 2000, 77).unwrap();
        let large = stay_small_probability_mc(100, 0.25, 1.0, 2000, 77).unwrap();
        let gap = small.estimate - large.estimate;
        let combined = small.combined_stderr(&large);
        assert!(
            gap >= 3.0 * combined,
            "gap {gap} under 3 combined stderr {combined}"
        );
    }

    #[test]
    fn reproducible_given_seed() {
        let a = stay_small_probability_mc(50, 0.3, 0.3, 400, 5).unwrap();
        let b = stay_small_probability_mc(50, 0.3, 0.3, 400, 5).unwrap();
        assert_eq!(a.sum, b.sum);
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(stay_small_probability_mc(1, 0.5, 0.5, 10, 1).is_err());
        assert!(stay_small_probability_mc(4, -0.1, 0.5, 10, 1).is_err());
        assert!(stay_small_probability_mc(4, 0.5, 0.5, 0, 1).is_err());
    }
}
