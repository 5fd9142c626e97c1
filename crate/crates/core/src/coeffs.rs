//! Deterministic coefficient sequences `a_n` (indexed from n = 1).
//!
//! Each model exposes pointwise values and the closed-form (or scanned) tail
//! envelope `sup_{n >= N} n^{-1/2} |a_n|` that the scale ladder folds into its
//! decay parameters.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A coefficient sequence. All variants are pure functions of the index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientModel {
    /// `a_n = n^{-alpha}` with `alpha >= -1/2` (keeps the tail envelope
    /// monotone, attained at the left end).
    PowerLaw { alpha: f64 },
    /// `a_n = delta0 * n^{-1/2}`.
    ScaledSqrt { delta0: f64 },
    /// `a_n = n^{-1/2} * (ln ln(n + e^2))^{-1}`: square-root decay with a
    /// slowly vanishing extra damping.
    Damped,
    /// Explicit complex values for `n = 1..=len`; zero beyond the table.
    Table { values: Vec<Complex64> },
    /// Zero for `n <= n0`, the inner model beyond.
    ZeroPrefix {
        n0: u64,
        inner: Box<CoefficientModel>,
    },
}

impl CoefficientModel {
    /// Validates parameters (finite, in range) recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientModel::PowerLaw { alpha } => {
                if !alpha.is_finite() || *alpha < -0.5 {
                    return Err(Error::InvalidParameter(format!(
                        "power_law alpha must be finite and >= -1/2, got {alpha}"
                    )));
                }
            }
            CoefficientModel::ScaledSqrt { delta0 } => {
                if !delta0.is_finite() || *delta0 < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "scaled_sqrt delta0 must be finite and >= 0, got {delta0}"
                    )));
                }
            }
            CoefficientModel::Damped => {}
            CoefficientModel::Table { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter(
                        "table coefficient model must be non-empty".into(),
                    ));
                }
                if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "table coefficient model contains non-finite values".into(),
                    ));
                }
            }
            CoefficientModel::ZeroPrefix { inner, .. } => inner.validate()?,
        }
        Ok(())
    }

    /// `a_n` for `n >= 1`. Errors on `n = 0` and on table lookups beyond the
    /// table length.
    pub fn coeff_at(&self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "coefficient index must be >= 1".into(),
            ));
        }
        Ok(self.coeff_unchecked(n))
    }

    /// `a_n` with the table reading 0 beyond its end (used by the evaluation
    /// engine after the ladder has verified coverage).
    #[inline]
    pub fn coeff_unchecked(&self, n: u64) -> Complex64 {
        debug_assert!(n >= 1);
        match self {
            CoefficientModel::PowerLaw { alpha } => {
                Complex64::new((n as f64).powf(-alpha), 0.0)
            }
            CoefficientModel::ScaledSqrt { delta0 } => {
                Complex64::new(delta0 / (n as f64).sqrt(), 0.0)
            }
            CoefficientModel::Damped => {
                let x = n as f64 + std::f64::consts::E * std::f64::consts::E;
                Complex64::new(1.0 / ((n as f64).sqrt() * x.ln().ln()), 0.0)
            }
            CoefficientModel::Table { values } => values
                .get((n - 1) as usize)
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0)),
            CoefficientModel::ZeroPrefix { n0, inner } => {
                if n <= *n0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    inner.coeff_unchecked(n)
                }
            }
        }
    }

    /// `|a_n|`.
    #[inline]
    pub fn amp(&self, n: u64) -> f64 {
        self.coeff_unchecked(n).norm()
    }

    /// Largest index the model can serve exactly; `None` means unbounded.
    /// For tables this is the table length (beyond it the sequence is
    /// declared zero, which ladder construction treats as an error when the
    /// ladder needs coverage).
    pub fn table_len(&self) -> Option<u64> {
        match self {
            CoefficientModel::Table { values } => Some(values.len() as u64),
            CoefficientModel::ZeroPrefix { inner, .. } => inner.table_len(),
            _ => None,
        }
    }

    /// `sup_{n >= n_from} n^{-1/2} |a_n|`, exact for the closed-form models
    /// (the map is nonincreasing, so the sup sits at `n_from`), by scan for
    /// tables (zero beyond the end).
    pub fn tail_envelope(&self, n_from: u64) -> f64 {
        let n_from = n_from.max(1);
        match self {
            CoefficientModel::PowerLaw { alpha } => (n_from as f64).powf(-(0.5 + alpha)),
            CoefficientModel::ScaledSqrt { delta0 } => delta0 / n_from as f64,
            CoefficientModel::Damped => {
                let x = n_from as f64 + std::f64::consts::E * std::f64::consts::E;
                1.0 / (n_from as f64 * x.ln().ln())
            }
            CoefficientModel::Table { values } => {
                let mut sup: f64 = 0.0;
                for n in n_from..=(values.len() as u64) {
                    sup = sup.max(values[(n - 1) as usize].norm() / (n as f64).sqrt());
                }
                sup
            }
            CoefficientModel::ZeroPrefix { n0, inner } => {
                inner.tail_envelope(n_from.max(n0 + 1))
            }
        }
    }
}
