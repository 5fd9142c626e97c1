//! Interval sets on the circle, box-counting dimension fits, and the
//! Frostman-ratio certificate for constructed measures.
//!
//! Box-counting slope is the computable surrogate for dimension from finite
//! data: it upper-bounds Hausdorff dimension, while the Frostman ratio on
//! the constructed measure certifies the lower-bound direction. Nothing here
//! claims a limit; the outputs are trends over a finite grid.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sorted disjoint closed subintervals of the circle R/Z, stored as
/// `[a, b]` with `0 <= a <= b <= 1`. Arcs crossing 0 are split during
/// normalization; components never touch after normalization, except for
/// the representational pair ending at 1 and starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    parts: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn full_circle() -> Self {
        Self {
            parts: vec![(0.0, 1.0)],
        }
    }

    /// Builds from closed arcs `(lo, hi)` with `lo <= hi`, interpreted on
    /// the circle: endpoints may lie outside `[0, 1]`, arcs of length >= 1
    /// cover everything, and arcs crossing 0 split in two.
    pub fn from_arcs<I: IntoIterator<Item = (f64, f64)>>(arcs: I) -> Result<Self> {
        let mut parts: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in arcs {
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(Error::InvalidParameter(format!(
                    "bad arc endpoints ({lo}, {hi})"
                )));
            }
            if hi - lo >= 1.0 {
                return Ok(Self::full_circle());
            }
            let a = lo.rem_euclid(1.0);
            let b = a + (hi - lo);
            if b > 1.0 {
                parts.push((0.0, b - 1.0));
                parts.push((a, 1.0));
            } else {
                parts.push((a, b));
            }
        }
        parts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { parts: merged })
    }

    /// Closed arcs `center +- radius` around each point.
    pub fn from_points(centers: &[f64], radius: f64) -> Result<Self> {
        Self::from_arcs(centers.iter().map(|&c| (c - radius, c + radius)))
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn num_components(&self) -> usize {
        self.parts.len()
    }

    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    /// Closed-set intersection; may contain degenerate single-point parts.
    pub fn intersect(&self, other: &Self) -> Self {
        let (xs, ys) = (&self.parts, &other.parts);
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < xs.len() && j < ys.len() {
            let lo = xs[i].0.max(ys[j].0);
            let hi = xs[i].1.min(ys[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if xs[i].1 <= ys[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { parts: out }
    }

    /// Membership (closed; the circle identifies 0 and 1).
    pub fn contains(&self, x: f64) -> bool {
        let x = x.rem_euclid(1.0);
        self.parts
            .iter()
            .any(|&(a, b)| (a <= x && x <= b) || (b == 1.0 && x == 0.0) || (a == 0.0 && x == 1.0))
    }

    /// Number of half-open grid cells `[m eps, (m+1) eps)` meeting the set.
    pub fn box_count(&self, eps: f64) -> u64 {
        assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
        let ncells = ncells_for(eps);
        let mut count = 0u64;
        let mut last_covered: Option<u64> = None;
        for &(a, b) in &self.parts {
            let lo = ((a / eps).floor() as u64).min(ncells - 1);
            let hi = ((b / eps).floor() as u64).min(ncells - 1);
            let start = match last_covered {
                Some(lc) if lc >= lo => lc + 1,
                _ => lo,
            };
            if start <= hi {
                count += hi - start + 1;
                last_covered = Some(hi);
            }
        }
        count
    }
}

/// Intersection across a family; the empty family is the full circle.
pub fn intersect_all(sets: &[IntervalSet]) -> IntervalSet {
    let mut acc = IntervalSet::full_circle();
    for s in sets {
        acc = acc.intersect(s);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Cell count of the grid of pitch `eps`: `1/eps` rounded when it is within
/// 1e-9 of an integer, otherwise rounded up.
fn ncells_for(eps: f64) -> u64 {
    let raw = 1.0 / eps;
    if (raw - raw.round()).abs() < 1e-9 {
        raw.round() as u64
    } else {
        raw.ceil() as u64
    }
}

/// A log-log least-squares fit of box counts against `1/eps`.
#[derive(Clone, Debug)]
pub struct DimensionFit {
    pub eps: Vec<f64>,
    pub counts: Vec<u64>,
    /// Slope of `ln N` vs `ln(1/eps)`; `None` when the set is empty or the
    /// grid is degenerate.
    pub slope: Option<f64>,
    /// Root-mean-square residual of the fit (0 when slope is `None`).
    pub residual: f64,
}

/// Least-squares slope of `ln N(eps)` against `ln(1/eps)` over the given
/// grid.
pub fn dimension_fit(set: &IntervalSet, eps_grid: &[f64]) -> DimensionFit {
    let counts: Vec<u64> = eps_grid.iter().map(|&e| set.box_count(e)).collect();
    if counts.iter().any(|&c| c == 0) || eps_grid.len() < 2 {
        return DimensionFit {
            eps: eps_grid.to_vec(),
            counts,
            slope: None,
            residual: 0.0,
        };
    }
    let xs: Vec<f64> = eps_grid.iter().map(|&e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return DimensionFit {
            eps: eps_grid.to_vec(),
            counts,
            slope: None,
            residual: 0.0,
        };
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    DimensionFit {
        eps: eps_grid.to_vec(),
        counts,
        slope: Some(slope),
        residual: (ss / n).sqrt(),
    }
}

/// Dyadic grid `2^{-j}` for `j = from..=to`.
pub fn dyadic_eps_grid(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|j| 2f64.powi(-(j as i32))).collect()
}

/// Powers-of-three grid `3^{-j}` for `j = from..=to`.
pub fn ternary_eps_grid(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|j| 3f64.powi(-(j as i32))).collect()
}

/// Depth-`d` middle-thirds approximant as a finite point set: the midpoints
/// of the 2^d surviving depth-`d` intervals. At `eps = 3^{-j}` (`j <= d`)
/// the box count is exactly `2^j`, so the fitted slope is `ln 2 / ln 3`.
pub fn cantor_approximant(depth: u32) -> IntervalSet {
    assert!(depth >= 1 && depth <= 26, "depth out of supported range");
    let mut points = Vec::with_capacity(1usize << depth);
    let offset = 0.5 * 3f64.powi(-(depth as i32));
    for bits in 0u64..(1u64 << depth) {
        let mut x = 0.0f64;
        let mut scale = 1.0f64 / 3.0;
        for j in 0..depth {
            if (bits >> j) & 1 == 1 {
                x += 2.0 * scale;
            }
            scale /= 3.0;
        }
        points.push(x + offset);
    }
    IntervalSet::from_arcs(points.into_iter().map(|p| (p, p))).unwrap()
}

/// Result of the dyadic Frostman-ratio scan.
#[derive(Clone, Debug)]
pub struct FrostmanCheck {
    /// `max_I nu(I) / |I|^tau` over dyadic `I` down to the finest scale.
    pub max_ratio: f64,
    /// Dyadic level of the maximizing interval (`|I| = 2^{-level}`).
    pub witness_level: u32,
    /// Index of the maximizing interval at that level.
    pub witness_index: u64,
    /// Exact value when `tau` is a nonnegative integer.
    pub exact: Option<BigRational>,
}

/// Scans `nu(I) / |I|^tau` over all dyadic intervals down to the measure's
/// finest scale. The measure is a union of uniform pieces
/// `(lo, hi, mass)`; every `f64` endpoint is a dyadic rational, so overlaps
/// are exact in rational arithmetic. General (non-dyadic) intervals cost at
/// most a constant factor against this scan and are not enumerated.
pub fn frostman_exponent_check(
    pieces: &[(f64, f64, BigRational)],
    tau: f64,
    max_level: Option<u32>,
) -> Result<FrostmanCheck> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("bad tau {tau}")));
    }
    for &(lo, hi, ref m) in pieces {
        if !lo.is_finite() || !hi.is_finite() || hi <= lo || m.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "bad measure piece ({lo}, {hi})"
            )));
        }
    }
    let min_width = pieces
        .iter()
        .map(|&(lo, hi, _)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    let auto_level = if min_width.is_finite() && min_width > 0.0 {
        (1.0 / min_width).log2().floor().max(0.0) as u32
    } else {
        0
    };
    let levels = max_level.unwrap_or(auto_level).min(26);
    let tau_int = if tau.fract() == 0.0 {
        Some(tau as u32)
    } else {
        None
    };

    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_exact: Option<BigRational> = None;
    let mut best_level = 0u32;
    let mut best_index = 0u64;

    for level in 0..=levels {
        let cells = 1u64 << level;
        let width = BigRational::new(BigInt::one(), BigInt::from(2u32).pow(level));
        // nu per touched cell, accumulated exactly.
        let mut nu: std::collections::BTreeMap<u64, BigRational> = std::collections::BTreeMap::new();
        for &(lo, hi, ref mass) in pieces {
            if mass.is_zero() {
                continue;
            }
            let scale = cells as f64;
            let first = ((lo.max(0.0) * scale).floor() as u64).min(cells - 1);
            let last = ((hi.min(1.0) * scale).floor() as u64).min(cells - 1);
            let piece_lo = BigRational::from_float(lo).unwrap();
            let piece_hi = BigRational::from_float(hi).unwrap();
            let piece_w = &piece_hi - &piece_lo;
            for cell in first..=last {
                let cell_lo = BigRational::new(BigInt::from(cell), BigInt::from(cells));
                let cell_hi = BigRational::new(BigInt::from(cell + 1), BigInt::from(cells));
                let olo = if piece_lo > cell_lo { piece_lo.clone() } else { cell_lo };
                let ohi = if piece_hi < cell_hi { piece_hi.clone() } else { cell_hi };
                if ohi > olo {
                    let share = mass * ((ohi - olo) / &piece_w);
                    *nu.entry(cell).or_insert_with(BigRational::zero) += share;
                }
            }
        }
        for (cell, val) in nu {
            match tau_int {
                Some(ti) => {
                    let denom = pow_rational(&width, ti);
                    let ratio = &val / &denom;
                    let approx = ratio.to_f64().unwrap_or(f64::INFINITY);
                    if approx > best_ratio {
                        best_ratio = approx;
                        best_exact = Some(ratio);
                        best_level = level;
                        best_index = cell;
                    }
                }
                None => {
                    let approx =
                        val.to_f64().unwrap_or(0.0) / 2f64.powf(-(level as f64) * tau);
                    if approx > best_ratio {
                        best_ratio = approx;
                        best_exact = None;
                        best_level = level;
                        best_index = cell;
                    }
                }
            }
        }
    }
    if best_ratio == f64::NEG_INFINITY {
        best_ratio = 0.0;
    }
    Ok(FrostmanCheck {
        max_ratio: best_ratio,
        witness_level: best_level,
        witness_index: best_index,
        exact: best_exact,
    })
}

fn pow_rational(x: &BigRational, e: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn wrap_and_merge() {
        // The wrapped tail [0, 0.1] touches [0.1, 0.3] and the closed union
        // merges them; [0.9, 1.0] stays separate on the line.
        let s = IntervalSet::from_arcs(vec![(0.1, 0.3), (0.25, 0.4), (0.9, 1.1)]).unwrap();
        let p = s.parts();
        assert_eq!(p.len(), 2);
        assert!(close(p[0].0, 0.0) && close(p[0].1, 0.4));
        assert!(close(p[1].0, 0.9) && close(p[1].1, 1.0));
        assert!(close(s.total_length(), 0.5));
        let t = IntervalSet::from_arcs(vec![(0.05, 0.3), (0.2, 0.4)]).unwrap();
        assert_eq!(t.parts().len(), 1);
        assert!(close(t.total_length(), 0.35));
    }

    #[test]
    fn oversized_arc_is_full_circle() {
        let s = IntervalSet::from_arcs(vec![(0.2, 1.7)]).unwrap();
        assert_eq!(s, IntervalSet::full_circle());
        assert!(IntervalSet::from_arcs(vec![(0.3, 0.2)]).is_err());
        assert!(IntervalSet::from_arcs(vec![(f64::NAN, 0.2)]).is_err());
    }

    #[test]
    fn box_count_full_circle_and_points() {
        let full = IntervalSet::full_circle();
        assert_eq!(full.box_count(0.1), 10);
        assert_eq!(full.box_count(1.0 / 7.0), 7);
        assert_eq!(full.box_count(0.3), 4);
        let point = IntervalSet::from_arcs(vec![(0.37, 0.37)]).unwrap();
        for eps in [0.5, 0.1, 0.031, 1.0 / 1024.0] {
            assert_eq!(point.box_count(eps), 1);
        }
        let boundary = IntervalSet::from_arcs(vec![(1.0, 1.0)]).unwrap();
        assert_eq!(boundary.box_count(0.1), 1);
    }

    #[test]
    fn box_count_walks_overlapping_cells_once() {
        let s = IntervalSet::from_arcs(vec![(0.11, 0.19), (0.21, 0.29)]).unwrap();
        assert_eq!(s.box_count(0.1), 2);
        assert_eq!(s.box_count(0.2), 2);
        let t = IntervalSet::from_arcs(vec![(0.05, 0.32)]).unwrap();
        assert_eq!(t.box_count(0.1), 4);
    }

    #[test]
    fn doubling_inequality_on_random_sets() {
        for trial in 0..40u64 {
            let mut arcs = Vec::new();
            for j in 0..6u64 {
                let w = crate::noise::mix64(trial * 97 + j);
                let a = ((w >> 11) as f64) * 2f64.powi(-53);
                let len = (((crate::noise::mix64(w) >> 11) as f64) * 2f64.powi(-53)) * 0.12;
                arcs.push((a, a + len));
            }
            let s = IntervalSet::from_arcs(arcs).unwrap();
            for eps in [0.2, 0.1, 0.05, 0.02] {
                let n1 = s.box_count(eps);
                let n2 = s.box_count(eps / 2.0);
                assert!(n1 <= n2, "counts grow as eps shrinks");
                assert!(
                    n2 <= 2 * n1 + s.num_components() as u64,
                    "trial {trial} eps {eps}: {n2} vs 2*{n1}+{}",
                    s.num_components()
                );
            }
        }
    }

    #[test]
    fn intersection_matches_pointwise_membership() {
        let a = IntervalSet::from_arcs(vec![(0.1, 0.45), (0.6, 0.8)]).unwrap();
        let b = IntervalSet::from_arcs(vec![(0.3, 0.65), (0.75, 1.02)]).unwrap();
        let c = a.intersect(&b);
        for i in 0..2000 {
            let x = (i as f64 + 0.5) / 2000.0;
            assert_eq!(
                c.contains(x),
                a.contains(x) && b.contains(x),
                "x = {x}"
            );
        }
    }

    #[test]
    fn intersection_can_be_a_point_and_nested_singletons_survive() {
        let a = IntervalSet::from_arcs(vec![(0.1, 0.5)]).unwrap();
        let b = IntervalSet::from_arcs(vec![(0.5, 0.7)]).unwrap();
        let c = a.intersect(&b);
        assert_eq!(c.parts(), &[(0.5, 0.5)]);
        assert_eq!(c.box_count(0.25), 1);

        let outer = IntervalSet::from_points(&[0.4], 0.1).unwrap();
        let inner = IntervalSet::from_points(&[0.42], 0.01).unwrap();
        let both = intersect_all(&[outer, inner]);
        assert!(!both.is_empty());
        assert!(close(both.total_length(), 0.02));

        let with_empty = intersect_all(&[IntervalSet::full_circle(), IntervalSet::empty()]);
        assert!(with_empty.is_empty());
        assert_eq!(intersect_all(&[]), IntervalSet::full_circle());
    }

    #[test]
    fn fit_full_circle_is_slope_one() {
        let fit = dimension_fit(&IntervalSet::full_circle(), &dyadic_eps_grid(2, 10));
        let slope = fit.slope.unwrap();
        assert!((slope - 1.0).abs() < 1e-12, "slope {slope}");
        assert!(fit.residual < 1e-12);
        for w in fit.counts.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn fit_degenerate_cases() {
        assert!(dimension_fit(&IntervalSet::empty(), &dyadic_eps_grid(2, 6))
            .slope
            .is_none());
        let point = IntervalSet::from_arcs(vec![(0.3, 0.3)]).unwrap();
        let fit = dimension_fit(&point, &dyadic_eps_grid(2, 12));
        assert_eq!(fit.slope, Some(0.0));
        // A finite point set flattens once eps refines below the separation.
        let pts = IntervalSet::from_arcs((0..8).map(|i| {
            let x = i as f64 / 8.0 + 0.013;
            (x, x)
        }))
        .unwrap();
        let coarse = dimension_fit(&pts, &dyadic_eps_grid(1, 3)).slope.unwrap();
        let fine = dimension_fit(&pts, &dyadic_eps_grid(8, 14)).slope.unwrap();
        assert!(fine.abs() < 1e-12 && coarse > 0.5);
    }

    #[test]
    fn cantor_counts_and_slope() {
        let c8 = cantor_approximant(8);
        assert_eq!(c8.num_components(), 256);
        assert_eq!(c8.box_count(3f64.powi(-8)), 256);
        assert_eq!(c8.box_count(3f64.powi(-3)), 8);
        assert_eq!(c8.box_count(1.0 / 3.0), 2);

        let c10 = cantor_approximant(10);
        let fit = dimension_fit(&c10, &ternary_eps_grid(1, 10));
        let slope = fit.slope.unwrap();
        let expect = 2f64.ln() / 3f64.ln();
        assert!(
            (slope - expect).abs() < 1e-9,
            "slope {slope} vs {expect}"
        );
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn union_counts_dominate_pointwise() {
        // Box counts of a union dominate each component's counts at every
        // eps. (The fitted slope of a union only dominates component slopes
        // when both components are in the same scaling regime on the grid:
        // mixing, say, a point cloud with a fat interval bends the combined
        // log-log curve and least squares lands in between.)
        let cantor = cantor_approximant(8);
        let fat = IntervalSet::from_arcs(vec![(0.82, 0.9)]).unwrap();
        let mut arcs: Vec<(f64, f64)> = cantor.parts().to_vec();
        arcs.extend(fat.parts().iter().copied());
        let union = IntervalSet::from_arcs(arcs).unwrap();
        for &eps in &ternary_eps_grid(1, 9) {
            let nu = union.box_count(eps);
            assert!(nu >= cantor.box_count(eps));
            assert!(nu >= fat.box_count(eps));
        }
    }

    #[test]
    fn union_slope_dominates_in_matching_regimes() {
        // Two plain intervals: both count curves are interval-like, so the
        // union's fitted slope keeps up with the best component.
        let a = IntervalSet::from_arcs(vec![(0.82, 0.9)]).unwrap();
        let b = IntervalSet::from_arcs(vec![(0.1, 0.35)]).unwrap();
        let mut arcs: Vec<(f64, f64)> = a.parts().to_vec();
        arcs.extend(b.parts().iter().copied());
        let union = IntervalSet::from_arcs(arcs).unwrap();
        let grid = ternary_eps_grid(4, 10);
        let su = dimension_fit(&union, &grid).slope.unwrap();
        let sa = dimension_fit(&a, &grid).slope.unwrap();
        let sb = dimension_fit(&b, &grid).slope.unwrap();
        assert!(su >= sa.max(sb) - 0.02, "{su} vs {sa}, {sb}");

        // Idempotent union: identical set, identical slope.
        let c = cantor_approximant(8);
        let self_union = IntervalSet::from_arcs(c.parts().to_vec()).unwrap();
        let grid = ternary_eps_grid(1, 8);
        assert_eq!(
            dimension_fit(&self_union, &grid).slope,
            dimension_fit(&c, &grid).slope
        );
    }

    #[test]
    fn frostman_uniform_circle() {
        let pieces = vec![(0.0, 1.0, BigRational::one())];
        let chk = frostman_exponent_check(&pieces, 1.0, Some(6)).unwrap();
        assert_eq!(chk.max_ratio, 1.0);
        assert_eq!(chk.exact, Some(BigRational::one()));
    }

    #[test]
    fn frostman_dyadic_block() {
        // Mass 1/3 spread on [1/4, 1/2]; tau = 2. Deepest tested level is
        // the piece's own width, where the ratio is (1/3)/(1/4)^2 = 16/3.
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let pieces = vec![(0.25, 0.5, third)];
        let chk = frostman_exponent_check(&pieces, 2.0, None).unwrap();
        let expect = BigRational::new(BigInt::from(16), BigInt::from(3));
        assert_eq!(chk.exact, Some(expect));
        assert_eq!(chk.witness_level, 2);
        assert_eq!(chk.witness_index, 1);
    }

    #[test]
    fn frostman_monotone_in_tau() {
        let mut pieces = Vec::new();
        for i in 0..5u64 {
            let w = crate::noise::mix64(i * 1011 + 5);
            let lo = ((w >> 11) as f64) * 2f64.powi(-53) * 0.9;
            let width = 0.01 + (((crate::noise::mix64(w) >> 11) as f64) * 2f64.powi(-53)) * 0.05;
            pieces.push((
                lo,
                lo + width,
                BigRational::new(BigInt::from(1), BigInt::from(5)),
            ));
        }
        let mut prev = f64::NEG_INFINITY;
        for tau in [0.0, 0.3, 0.5, 1.0, 1.5, 2.0] {
            let c = frostman_exponent_check(&pieces, tau, Some(8)).unwrap().max_ratio;
            assert!(c >= prev - 1e-12, "tau {tau}: {c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn frostman_rejects_bad_input() {
        assert!(frostman_exponent_check(&[(0.2, 0.1, BigRational::one())], 1.0, None).is_err());
        assert!(frostman_exponent_check(&[(0.1, 0.2, BigRational::one())], -1.0, None).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn normalized_sets_are_sorted_disjoint(
            seeds in prop::collection::vec(0u64..u64::MAX, 1..10),
        ) {
            let arcs: Vec<(f64, f64)> = seeds
                .iter()
                .map(|&s| {
                    let a = ((crate::noise::mix64(s) >> 11) as f64) * 2f64.powi(-53) * 1.4;
                    let len = ((crate::noise::mix64(s ^ 1) >> 11) as f64) * 2f64.powi(-53) * 0.3;
                    (a, a + len)
                })
                .collect();
            let set = IntervalSet::from_arcs(arcs).unwrap();
            let p = set.parts();
            for w in p.windows(2) {
                prop_assert!(w[0].1 < w[1].0, "components must not touch");
            }
            for &(a, b) in p {
                prop_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
            }
            prop_assert!(set.total_length() <= 1.0 + 1e-12);
        }
    }
}
