//! Core library of `rpslab`, a numerical laboratory for random power series
//! `sum_n eps_n a_n z^n` on the unit circle.
//!
//! The pieces, bottom to top:
//!
//! * [`kahan`]: compensated summation used everywhere a tolerance is quoted.
//! * [`noise`]: counter-based, seedable randomness: Rademacher signs and
//!   Gaussians addressable by absolute index, independent of query order.
//! * [`coeffs`]: deterministic coefficient sequences `a_n`.
//! * [`ladder`]: the scale sequences `N_1 < N_2 < ...`, their ratios,
//!   decay parameters, and geometric sub-scale grids.
//! * [`sums`]: the evaluation engine: per-block partial sums on uniform
//!   nets via residue folding plus FFT, with direct-summation oracles.
//! * [`window`]: the fixed smooth bump used by soft scoring and smoothed
//!   test functionals.
//! * [`goodness`]: threshold families, good masks, and the soft score.
//! * [`branching`]: parent/child index maps, alive-set propagation,
//!   healthy refinement, survivor intervals, and the nesting check.
//! * [`measure`]: the exact-rational mass distribution over healthy points
//!   with its absorbing sink.
//! * [`dimension`]: interval sets, box counting, slope fitting, and the
//!   exponent check for the constructed measure.
//! * [`diagnostics`]: Monte Carlo and exact checks of the probabilistic
//!   ingredients (sieve inequality, correlation counts, one-point and
//!   stay-small events, swap discrepancy, correlation inequality for
//!   symmetric convex sets, small-ball probabilities, tail-event
//!   frequencies).
//!
//! Everything is deterministic given `(config, seed)`: same inputs, same
//! bytes, regardless of thread count or call order.

pub mod branching;
pub mod coeffs;
pub mod diagnostics;
pub mod dimension;
pub mod error;
pub mod goodness;
pub mod hashutil;
pub mod kahan;
pub mod ladder;
pub mod measure;
pub mod noise;
pub mod sums;
pub mod window;

pub use error::{Error, Result};

/// Version of the noise stream layout. Bump on any change to the mixing
/// function, stream tags, or sub-counter layout; archived manifests record it
/// so old results stay attributable.
pub const GENERATOR_VERSION: u32 = 1;
