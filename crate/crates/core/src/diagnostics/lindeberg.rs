//! Swap discrepancy: how much a smooth statistic of two weighted sums
//! moves when sign multipliers are replaced by Gaussians with the same
//! first two moments. The third-derivative bookkeeping bounds the move by
//! `M3 * sum(|a_j|^3 + |b_j|^3)`; the estimator pairs both draws on the
//! same trial stream, so the gap's error bar comes from the paired
//! differences.

use super::seed_labels;
use crate::error::{Error, Result};
use crate::noise::{derive_seed, NoiseStream, StreamId};
use crate::window::{window_radial, WINDOW_DERIV_BOUND};
use num_complex::Complex64;
use serde::Serialize;

/// One monomial `coeff * x0^p0 x1^p1 x2^p2 x3^p3` over the four real
/// coordinates (real and imaginary parts of the two sums).
#[derive(Clone, Debug, Serialize)]
pub struct PolyTerm {
    pub powers: [u8; 4],
    pub coeff: f64,
}

#[derive(Clone, Debug)]
pub enum TestFunctional {
    /// Polynomial of total degree at most 3.
    Polynomial { terms: Vec<PolyTerm> },
    /// `H(alpha |Z|) * H(beta |W|)` with the fixed smooth bump `H`.
    SmoothedIndicator { alpha: f64, beta: f64 },
}

/// Operator-norm majorants for derivative tensors of the radial bump
/// `z -> H(gamma |z|)` in the plane, orders 0..=3. The plateau keeps all
/// derivatives supported on `gamma |z| >= 1`, where `1/|z| <= gamma`
/// converts the curvature terms.
fn radial_tensor_bound(order: usize, gamma: f64) -> f64 {
    let b = WINDOW_DERIV_BOUND;
    let raw = match order {
        0 => b[0],
        1 => b[1],
        2 => b[2].max(b[1]),
        3 => b[3] + 3.0 * b[2] + 3.0 * b[1],
        _ => unreachable!(),
    };
    raw * gamma.powi(order as i32)
}

impl TestFunctional {
    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunctional::Polynomial { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("empty polynomial".into()));
                }
                for t in terms {
                    let deg: u8 = t.powers.iter().sum();
                    if deg > 3 {
                        return Err(Error::InvalidParameter(format!(
                            "monomial degree {deg} exceeds 3"
                        )));
                    }
                }
                Ok(())
            }
            TestFunctional::SmoothedIndicator { alpha, beta } => {
                if *alpha > 0.0 && *beta > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(
                        "indicator scales must be positive".into(),
                    ))
                }
            }
        }
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        match self {
            TestFunctional::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.coeff
                        * x.iter()
                            .zip(&t.powers)
                            .map(|(&v, &p)| v.powi(p as i32))
                            .product::<f64>()
                })
                .sum(),
            TestFunctional::SmoothedIndicator { alpha, beta } => {
                window_radial(alpha * x[0].hypot(x[1]))
                    * window_radial(beta * x[2].hypot(x[3]))
            }
        }
    }

    /// Published sup bound on third directional derivatives.
    pub fn third_derivative_bound(&self) -> f64 {
        match self {
            TestFunctional::Polynomial { terms } => {
                6.0 * terms
                    .iter()
                    .filter(|t| t.powers.iter().sum::<u8>() == 3)
                    .map(|t| t.coeff.abs())
                    .sum::<f64>()
            }
            TestFunctional::SmoothedIndicator { alpha, beta } => {
                let binom = [1.0, 3.0, 3.0, 1.0];
                (0..=3)
                    .map(|i| {
                        binom[i]
                            * radial_tensor_bound(i, *alpha)
                            * radial_tensor_bound(3 - i, *beta)
                    })
                    .sum()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LindebergReport {
    pub rademacher_mean: f64,
    pub gaussian_mean: f64,
    pub gap: f64,
    /// Standard error of the paired difference of means.
    pub gap_stderr: f64,
    pub bound: f64,
    pub trials: u64,
    pub seed: u64,
}

pub fn lindeberg_discrepancy(
    a: &[Complex64],
    b: &[Complex64],
    f: &TestFunctional,
    trials: u64,
    master_seed: u64,
) -> Result<LindebergReport> {
    f.validate()?;
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidParameter(
            "weight lists must be nonempty and equally long".into(),
        ));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("trials must be >= 2".into()));
    }
    let mut sum_r = 0.0f64;
    let mut sum_g = 0.0f64;
    let mut sum_d = 0.0f64;
    let mut sum_d2 = 0.0f64;
    for trial in 0..trials {
        let seed = derive_seed(master_seed, seed_labels::LINDEBERG, trial);
        let signs = NoiseStream::new(seed, StreamId::Rademacher);
        let gauss = NoiseStream::new(seed, StreamId::Gaussian);
        let mut zr = Complex64::new(0.0, 0.0);
        let mut wr = Complex64::new(0.0, 0.0);
        let mut zg = Complex64::new(0.0, 0.0);
        let mut wg = Complex64::new(0.0, 0.0);
        for (j, (&aj, &bj)) in a.iter().zip(b).enumerate() {
            let n = j as u64 + 1;
            let s = signs.sign_at(n);
            let g = gauss.gaussian_at(n);
            zr += s * aj;
            wr += s * bj;
            zg += g * aj;
            wg += g * bj;
        }
        let fr = f.eval([zr.re, zr.im, wr.re, wr.im]);
        let fg = f.eval([zg.re, zg.im, wg.re, wg.im]);
        sum_r += fr;
        sum_g += fg;
        let d = fr - fg;
        sum_d += d;
        sum_d2 += d * d;
    }
    let n = trials as f64;
    let mean_d = sum_d / n;
    let var_d = ((sum_d2 / n - mean_d * mean_d) * n / (n - 1.0)).max(0.0);
    let bound = f.third_derivative_bound()
        * a.iter()
            .zip(b)
            .map(|(x, y)| x.norm().powi(3) + y.norm().powi(3))
            .sum::<f64>();
    Ok(LindebergReport {
        rademacher_mean: sum_r / n,
        gaussian_mean: sum_g / n,
        gap: mean_d.abs(),
        gap_stderr: (var_d / n).sqrt(),
        bound,
        trials,
        seed: master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::mix64;

    fn dyadic_block(m: u32) -> Vec<Complex64> {
        (1u64 << m..1 << (m + 1))
            .map(|n| Complex64::new((n as f64).powf(-0.5), 0.0))
            .collect()
    }

    fn poly(terms: &[([u8; 4], f64)]) -> TestFunctional {
        TestFunctional::Polynomial {
            terms: terms
                .iter()
                .map(|&(powers, coeff)| PolyTerm { powers, coeff })
                .collect(),
        }
    }

    #[test]
    fn linear_statistic_has_no_gap() {
        let f = poly(&[([1, 0, 0, 0], 1.0), ([0, 0, 1, 0], 2.0), ([0, 0, 0, 1], -0.5)]);
        let a = dyadic_block(4);
        let b = dyadic_block(5);
        let rep = lindeberg_discrepancy(&a, &b[..a.len()], &f, 20_000, 31).unwrap();
        assert_eq!(rep.bound, 0.0);
        assert!(
            rep.gap <= 4.0 * rep.gap_stderr,
            "gap {} stderr {}",
            rep.gap,
            rep.gap_stderr
        );
    }

    #[test]
    fn quadratic_statistics_have_no_gap() {
        let f = poly(&[
            ([2, 0, 0, 0], 1.0),
            ([1, 1, 0, 0], 0.7),
            ([0, 0, 1, 1], -1.3),
            ([0, 1, 0, 1], 0.4),
        ]);
        let a = dyadic_block(4);
        let b: Vec<Complex64> = dyadic_block(4)
            .into_iter()
            .map(|c| c * Complex64::new(0.3, 0.9))
            .collect();
        let rep = lindeberg_discrepancy(&a, &b, &f, 20_000, 32).unwrap();
        assert_eq!(rep.bound, 0.0);
        assert!(rep.gap <= 4.0 * rep.gap_stderr);
    }

    #[test]
    fn cubic_statistic_stays_within_published_bound() {
        let f = poly(&[([3, 0, 0, 0], 1.0), ([1, 0, 2, 0], -0.6), ([0, 2, 0, 1], 0.2)]);
        let a = dyadic_block(5);
        let b = dyadic_block(5);
        let rep = lindeberg_discrepancy(&a, &b, &f, 20_000, 33).unwrap();
        assert!(rep.bound > 0.0);
        assert!((rep.bound - 6.0 * 1.8 * 2.0 * a.iter().map(|c| c.norm().powi(3)).sum::<f64>()).abs() < 1e-12);
        assert!(rep.gap <= 10.0 * rep.bound);
        assert!(rep.gap <= 4.0 * rep.gap_stderr);
    }

    #[test]
    fn degree_four_rejected() {
        let f = poly(&[([2, 2, 0, 0], 1.0)]);
        let a = dyadic_block(3);
        assert!(lindeberg_discrepancy(&a, &a, &f, 100, 1).is_err());
        let neg = TestFunctional::SmoothedIndicator {
            alpha: 0.0,
            beta: 1.0,
        };
        assert!(lindeberg_discrepancy(&a, &a, &neg, 100, 1).is_err());
    }

    #[test]
    fn smoothed_indicator_sweep_respects_bound() {
        for i in 0..50u64 {
            let h = mix64(0xBEEF ^ i);
            let alpha = 0.5 + 1.5 * (h & 0xFFFF) as f64 / 65535.0;
            let beta = 0.5 + 1.5 * ((h >> 16) & 0xFFFF) as f64 / 65535.0;
            let m = 4 + (h >> 32) % 4;
            let f = TestFunctional::SmoothedIndicator { alpha, beta };
            let a = dyadic_block(m as u32);
            let b = dyadic_block(m as u32);
            let rep = lindeberg_discrepancy(&a, &b, &f, 2000, 0x5EED ^ i).unwrap();
            assert!(
                rep.gap <= 10.0 * rep.bound,
                "instance {i}: gap {} bound {}",
                rep.gap,
                rep.bound
            );
            assert!(rep.bound.is_finite() && rep.bound > 0.0);
        }
    }

    #[test]
    fn smoothed_bound_formula_matches_expansion() {
        let f = TestFunctional::SmoothedIndicator {
            alpha: 2.0,
            beta: 0.5,
        };
        let t = |o: usize, g: f64| radial_tensor_bound(o, g);
        let expect = t(3, 2.0) * t(0, 0.5)
            + 3.0 * t(2, 2.0) * t(1, 0.5)
            + 3.0 * t(1, 2.0) * t(2, 0.5)
            + t(0, 2.0) * t(3, 0.5);
        assert!((f.third_derivative_bound() - expect).abs() < 1e-12);
        // Order scaling: doubling one scale multiplies its order-3 term by 8.
        assert!((t(3, 2.0) - 8.0 * t(3, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn paired_runs_are_reproducible() {
        let f = TestFunctional::SmoothedIndicator {
            alpha: 1.0,
            beta: 1.0,
        };
        let a = dyadic_block(4);
        let r1 = lindeberg_discrepancy(&a, &a, &f, 500, 9).unwrap();
        let r2 = lindeberg_discrepancy(&a, &a, &f, 500, 9).unwrap();
        assert_eq!(r1.gap, r2.gap);
        assert_eq!(r1.rademacher_mean, r2.rademacher_mean);
        assert_eq!(r1.gaussian_mean, r2.gaussian_mean);
    }
}
