//! Pair correlation counts over a transition block: two sample points are
//! correlated when some sub-block carries a large real-component product
//! sum between their coefficient rotations. The report carries the
//! spectral-count prediction `rho^-2 (1/delta + |S|) M / N^2` for
//! comparison with the exact counts.

use crate::coeffs::CoefficientModel;
use crate::error::{Error, Result};
use crate::ladder::ScaleLadder;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    /// Max over sub-blocks and the four real/imaginary component pairings
    /// of the absolute product sum.
    pub max_stat: f64,
    pub correlated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub rho: f64,
    /// Minimal pairwise circle distance among the sample points.
    pub separation: f64,
    /// One record per unordered pair, `i < j`.
    pub pairs: Vec<PairRecord>,
    pub per_point_counts: Vec<usize>,
    /// `rho^-2 (1/separation + |S|) * block_length / N_k^2`.
    pub predicted_count: f64,
}

/// Max over the four component pairings of `|sum_n u_n v_n|` where each
/// factor independently contributes its real or imaginary part.
pub fn pair_statistic(u: &[Complex64], v: &[Complex64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let (mut cc, mut cs, mut sc, mut ss) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (a, b) in u.iter().zip(v) {
        cc += a.re * b.re;
        cs += a.re * b.im;
        sc += a.im * b.re;
        ss += a.im * b.im;
    }
    cc.abs().max(cs.abs()).max(sc.abs()).max(ss.abs())
}

fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn rotations(
    coeffs: &CoefficientModel,
    theta: f64,
    lo: u64,
    hi: u64,
) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
    let start = lo as f64 * theta;
    let mut w = Complex64::from_polar(1.0, std::f64::consts::TAU * (start - start.floor()));
    (lo..hi)
        .map(|n| {
            let out = coeffs.coeff_unchecked(n) * w;
            w *= step;
            out
        })
        .collect()
}

/// Exact correlated-pair counts over the sub-blocks of transition `k`
/// (coefficients `n in [N_k, N_{k+1})`), brute force in
/// `O(|S|^2 * block length)`.
pub fn rho_correlation_count(
    points: &[f64],
    ladder: &ScaleLadder,
    coeffs: &CoefficientModel,
    k: usize,
    rho: f64,
    cap: usize,
) -> Result<CorrelationReport> {
    if !(1..ladder.depth()).contains(&k) {
        return Err(Error::ScaleOutOfRange {
            index: k,
            depth: ladder.depth(),
        });
    }
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "correlation needs at least two sample points".into(),
        ));
    }
    if points.len() > cap {
        return Err(Error::InvalidParameter(format!(
            "{} sample points exceed the brute-force cap {cap}",
            points.len()
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho {rho} must be > 0")));
    }
    let lo = ladder.n_at(k);
    let hi = ladder.n_at(k + 1);
    for n in lo..hi {
        let lim = (n as f64).powf(-0.5) * (1.0 + 1e-12);
        if coeffs.amp(n) > lim {
            return Err(Error::InvalidParameter(format!(
                "|a_{n}| = {} exceeds n^-1/2 on the block",
                coeffs.amp(n)
            )));
        }
    }
    let mut separation = f64::INFINITY;
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            separation = separation.min(circle_distance(x, y));
        }
    }
    if separation == 0.0 {
        return Err(Error::InvalidParameter(
            "duplicate sample points: separation is zero".into(),
        ));
    }
    let grid = ladder.grid(k);
    let seqs: Vec<Vec<Complex64>> = points
        .iter()
        .map(|&theta| rotations(coeffs, theta, lo, hi))
        .collect();
    let mut pairs = Vec::new();
    let mut per_point_counts = vec![0usize; points.len()];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let mut max_stat = 0.0f64;
            for (blo, bhi) in grid.blocks() {
                let a = (blo - lo) as usize;
                let b = (bhi - lo) as usize;
                max_stat = max_stat.max(pair_statistic(&seqs[i][a..b], &seqs[j][a..b]));
            }
            let correlated = max_stat > rho;
            if correlated {
                per_point_counts[i] += 1;
                per_point_counts[j] += 1;
            }
            pairs.push(PairRecord {
                i,
                j,
                max_stat,
                correlated,
            });
        }
    }
    let m_len = (hi - lo) as f64;
    let predicted_count = rho.powi(-2) * (1.0 / separation + points.len() as f64) * m_len
        / (lo as f64 * lo as f64);
    Ok(CorrelationReport {
        rho,
        separation,
        pairs,
        per_point_counts,
        predicted_count,
    })
}
