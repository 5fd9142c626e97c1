use thiserror::Error;

/// Errors surfaced by ladder construction, coefficient models, and the
/// evaluation engine. All are configuration or range problems; numerical
/// tolerances never error, they are reported as data.
#[derive(Debug, Error)]
pub enum Error {
    /// The scale recursion left the representable integer range.
    #[error("scale ladder overflow at scale {scale}: {detail}")]
    LadderOverflow { scale: usize, detail: String },

    /// A recursion step produced a ratio that cannot grow the ladder.
    #[error("degenerate ladder step at scale {scale}: ratio {ratio} < 2")]
    DegenerateStep { scale: usize, ratio: u64 },

    /// A sub-scale grid cannot fit a single block of the required ratio.
    #[error("sub-scale grid cannot fit one step: range [{lo}, {hi}] needs ratio >= {min_ratio}")]
    GridTooTight { lo: u64, hi: u64, min_ratio: f64 },

    /// Parameter validation failure with a human-readable reason.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A table coefficient model was asked for an index beyond its data.
    #[error("coefficient table too short: need index {needed}, table has {have} entries")]
    TableTooShort { needed: u64, have: usize },

    /// A scale index outside 1..=depth (or a transition outside 1..depth).
    #[error("scale index {index} out of range for depth {depth}")]
    ScaleOutOfRange { index: usize, depth: usize },

    /// A brute-force operation would exceed its configured cap.
    #[error("size cap exceeded: {what} = {value} > cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
