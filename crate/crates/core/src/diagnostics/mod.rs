//! Monte Carlo and exact verification of the probabilistic machinery the
//! construction relies on: the large sieve bound, pair correlation counts,
//! one-point small-ball frequencies, the stay-small contrast experiment,
//! swap discrepancy between sign and Gaussian multipliers, the Gaussian
//! correlation inequality, the reflection-series small-ball oracle, and the
//! rare-event frequencies with their union-bound predictions.
//!
//! Every estimate carries its sampling error and the seed that produced it;
//! trials draw from counter-based streams keyed by `derive_seed`, so each
//! result is reproducible bit for bit and experiments sharing a master seed
//! never overlap.

pub mod correlation;
pub mod events;
pub mod gci;
pub mod lindeberg;
pub mod onepoint;
pub mod sieve;
pub mod smallball;
pub mod staysmall;

pub use correlation::{pair_statistic, rho_correlation_count, CorrelationReport, PairRecord};
pub use events::{event_e1_frequency, event_e2_frequency, EventReport};
pub use gci::{gci_check_mc, random_slab_pair, ConvexSet, GciReport};
pub use lindeberg::{lindeberg_discrepancy, LindebergReport, PolyTerm, TestFunctional};
pub use onepoint::{one_point_probability_mc, OnePointReport};
pub use sieve::{equality_instance, large_sieve_check, random_sieve_instance, SieveInstance, SieveReport};
pub use smallball::{small_ball_mc, small_ball_series};
pub use staysmall::{stay_small_probability_mc, STAY_SMALL_THETA};

use serde::Serialize;

/// Seed-derivation labels, one per experiment family, so diagnostics
/// sharing a master seed never reuse trial streams.
pub mod seed_labels {
    pub const SIEVE: u64 = 1;
    pub const CORRELATION: u64 = 2;
    pub const ONE_POINT: u64 = 3;
    pub const STAY_SMALL: u64 = 4;
    pub const LINDEBERG: u64 = 5;
    pub const GCI: u64 = 6;
    pub const SMALL_BALL: u64 = 7;
    pub const EVENTS: u64 = 8;
    pub const SWEEP: u64 = 9;
}

/// A Monte Carlo estimate with its sample-based standard error and the seed
/// that reproduces it.
#[derive(Clone, Debug, Serialize)]
pub struct MCEstimate {
    pub trials: u64,
    /// Success count for frequency estimates, weight total otherwise.
    pub sum: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn from_bernoulli(successes: u64, trials: u64, seed: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            trials,
            sum: successes as f64,
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
        }
    }

    pub fn from_weights(sum: f64, sum_sq: f64, trials: u64, seed: u64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = if trials > 1 {
            ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            trials,
            sum,
            estimate: mean,
            stderr: (var / n).sqrt(),
            seed,
        }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &MCEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}
