//! Counter-based randomness: every draw is a pure function of
//! `(seed, stream, index)`.
//!
//! Blocks of signs or Gaussians can be re-materialized in any order, in any
//! chunking, on any thread, and always come out identical. There is no
//! sequential generator state anywhere.
//!
//! Construction: a 64-bit keyed mixing function (the SplitMix64 finalizer)
//! applied to an affine counter walk,
//! `word(i) = mix64(base + i * GOLDEN_GAMMA)` with
//! `base = mix64(seed ^ mix64(tag ^ SALT))`. Streams with different tags are
//! domain-separated; indices within a stream are decorrelated by the mixer.

use serde::{Deserialize, Serialize};

/// Odd constant used to step the counter (2^64 / golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain-separation constant folded into every stream tag.
const STREAM_SALT: u64 = 0x8FB3_C5A4_D129_E07B;

/// 64-bit finalizer with full avalanche (SplitMix64 / Murmur3-style).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Identifies one independent stream under a common seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamId {
    /// Uniform signs in {-1, +1}.
    Rademacher,
    /// Standard normal variates.
    Gaussian,
    /// Caller-tagged side stream (independent copies, per-trial draws, ...).
    Auxiliary(u64),
}

impl StreamId {
    fn tag(self) -> u64 {
        match self {
            StreamId::Rademacher => 1,
            StreamId::Gaussian => 2,
            StreamId::Auxiliary(t) => 3u64.wrapping_add(t),
        }
    }
}

/// One addressable stream of draws. Copy-cheap; carries only the mixed base.
#[derive(Clone, Copy, Debug)]
pub struct NoiseStream {
    base: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        Self {
            base: mix64(seed ^ mix64(id.tag() ^ STREAM_SALT)),
        }
    }

    /// Raw 64-bit word at counter `i`.
    #[inline]
    pub fn word(&self, i: u64) -> u64 {
        mix64(self.base.wrapping_add(i.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Sign in {-1.0, +1.0} at index `n` (top bit of the word).
    #[inline]
    pub fn sign_at(&self, n: u64) -> f64 {
        if self.word(n) >> 63 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Uniform draw in the open interval (0, 1) at counter `i`:
    /// 53 high bits, centered on the representable grid.
    #[inline]
    pub fn open01_at(&self, i: u64) -> f64 {
        ((self.word(i) >> 11) as f64 + 0.5) * 2f64.powi(-53)
    }

    /// Standard normal at index `n`: Box-Muller cosine branch driven by the
    /// uniforms at sub-counters `2n` and `2n + 1`.
    #[inline]
    pub fn gaussian_at(&self, n: u64) -> f64 {
        self.gaussian_pair_at(n).0
    }

    /// Both Box-Muller branches at index `n`. The first component equals
    /// [`Self::gaussian_at`]`(n)` exactly; consumers that can use two
    /// variates per index halve the transcendental cost.
    #[inline]
    pub fn gaussian_pair_at(&self, n: u64) -> (f64, f64) {
        let u1 = self.open01_at(2 * n);
        let u2 = self.open01_at(2 * n + 1);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }
}

/// Derives a child seed from a master seed, a purpose label, and an index
/// (trial number, sweep cell, ...). Children are decorrelated from each other
/// and from the master's own streams.
pub fn derive_seed(master: u64, label: u64, index: u64) -> u64 {
    mix64(
        mix64(master.wrapping_add(label.wrapping_mul(GOLDEN_GAMMA)))
            .wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)),
    )
}
