//! Multi-scale survival structure: parent maps and child windows between
//! consecutive nets, alive-set evolution, the two-generation healthy
//! refinement, widened survivor intervals, and the interval-nesting check.
//!
//! Nets are multiplicatively nested (`N_k = N_{k-1} M_k`), so the parent of
//! a fine slot is the nearest coarse slot and each coarse point owns a
//! disjoint window of fine slots (disjointness is validated at ladder
//! build: `2W + 1 <= M`). All window counting uses circular prefix sums.

use crate::dimension::IntervalSet;
use crate::error::{Error, Result};
use crate::goodness::GoodMask;
use crate::ladder::ScaleLadder;
use crate::sums::t_of;

/// Nearest coarse slot to fine slot `s` under ratio `m`, ties toward the
/// smaller index, plus the distance to that parent's image.
#[inline]
pub fn window_offset(fine_slot: usize, m: u64) -> (u64, u64) {
    let s = fine_slot as u64;
    let p_raw = (2 * s + m - 1) / (2 * m);
    let center = p_raw * m;
    let off = center.abs_diff(s);
    (p_raw, off)
}

/// Parent slot of a fine slot on the coarse net of size `coarse_n`.
#[inline]
pub fn parent_slot(fine_slot: usize, m: u64, coarse_n: u64) -> usize {
    (window_offset(fine_slot, m).0 % coarse_n) as usize
}

/// One alive refinement: fine point survives iff it is good and lies within
/// the window (halfwidth `w`) of an alive parent. Windows are disjoint, so
/// this is equivalent to scanning all alive parents' windows.
pub fn alive_step(prev_alive: &[bool], good: &GoodMask, m: u64, w: u64) -> Vec<bool> {
    let coarse_n = prev_alive.len() as u64;
    debug_assert_eq!(good.net_n, coarse_n * m);
    good.mask
        .iter()
        .enumerate()
        .map(|(s, &g)| {
            if !g {
                return false;
            }
            let (p_raw, off) = window_offset(s, m);
            off <= w && prev_alive[(p_raw % coarse_n) as usize]
        })
        .collect()
}

/// Alive masks per scale, base case all of the first net.
#[derive(Clone, Debug)]
pub struct BranchLevels {
    /// `alive[k - 1]` is the slot mask of scale `k`.
    pub alive: Vec<Vec<bool>>,
    /// First scale whose alive set is empty, if any.
    pub extinction_scale: Option<usize>,
}

impl BranchLevels {
    pub fn counts(&self) -> Vec<usize> {
        self.alive
            .iter()
            .map(|m| m.iter().filter(|&&b| b).count())
            .collect()
    }

    /// Deepest scale with a nonempty alive set.
    pub fn survival_depth(&self) -> usize {
        self.counts().iter().rposition(|&c| c > 0).map_or(0, |i| i + 1)
    }
}

/// Evolves alive masks through all scales. `good[i]` must be the mask of
/// scale `i + 2`.
pub fn alive_levels(ladder: &ScaleLadder, good: &[GoodMask]) -> Result<BranchLevels> {
    let depth = ladder.depth();
    if good.len() != depth - 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} good masks, got {}",
            depth - 1,
            good.len()
        )));
    }
    for (i, g) in good.iter().enumerate() {
        let k = i + 2;
        if g.scale != k || g.net_n != ladder.n_at(k) {
            return Err(Error::InvalidParameter(format!(
                "good mask {i} does not match scale {k}"
            )));
        }
    }
    let mut alive: Vec<Vec<bool>> = Vec::with_capacity(depth);
    alive.push(vec![true; ladder.n_at(1) as usize]);
    let mut extinction_scale = None;
    for k in 2..=depth {
        let next = alive_step(
            &alive[k - 2],
            &good[k - 2],
            ladder.m_at(k),
            ladder.child_window(k),
        );
        if extinction_scale.is_none() && next.iter().all(|&b| !b) {
            extinction_scale = Some(k);
        }
        alive.push(next);
    }
    Ok(BranchLevels {
        alive,
        extinction_scale,
    })
}

/// Prefix counts of a boolean mask: `pref[i]` = number of true slots below
/// `i`.
pub fn prefix_counts(mask: &[bool]) -> Vec<u64> {
    let mut pref = Vec::with_capacity(mask.len() + 1);
    let mut acc = 0u64;
    pref.push(0);
    for &b in mask {
        acc += b as u64;
        pref.push(acc);
    }
    pref
}

/// Count of true slots in the circular window `[center - w, center + w]`
/// of a net of size `n`, from that mask's prefix counts. Requires
/// `2w + 1 <= n`.
pub fn count_window(pref: &[u64], n: u64, center: u64, w: u64) -> u64 {
    debug_assert!(2 * w < n);
    let a = (center + n - (w % n)) % n;
    let b = (center + w) % n;
    if a <= b {
        pref[(b + 1) as usize] - pref[a as usize]
    } else {
        (pref[n as usize] - pref[a as usize]) + pref[(b + 1) as usize]
    }
}

/// For every slot of the net of size `fine_n`, whether its window into the
/// next net (ratio `m_next`, halfwidth `w_next`) holds at least `threshold`
/// points of `good_next` (closed comparison).
pub fn descendant_count_ok(
    good_next: &GoodMask,
    fine_n: u64,
    m_next: u64,
    w_next: u64,
    threshold: f64,
) -> Vec<bool> {
    debug_assert_eq!(good_next.net_n, fine_n * m_next);
    let pref = prefix_counts(&good_next.mask);
    (0..fine_n)
        .map(|phi| {
            let center = (phi * m_next) % good_next.net_n;
            (count_window(&pref, good_next.net_n, center, w_next) as f64) >= threshold
        })
        .collect()
}

/// Healthy masks for levels `1..=K-2`.
///
/// A point is healthy when it is good, sits in its healthy parent's window,
/// and owns enough qualified children: children that are good and have at
/// least `M_{l+2}^{1 - tau/2}` good grandchildren; "enough" is
/// `M_{l+1}^{1 - tau}`. Level 1 has no goodness or parent condition.
pub fn healthy_levels(
    ladder: &ScaleLadder,
    good: &[GoodMask],
    tau: f64,
) -> Result<Vec<Vec<bool>>> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau {tau} outside [0, 1]")));
    }
    let depth = ladder.depth();
    if good.len() != depth - 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} good masks, got {}",
            depth - 1,
            good.len()
        )));
    }
    if depth < 3 {
        return Ok(Vec::new());
    }
    let mut healthy: Vec<Vec<bool>> = Vec::with_capacity(depth - 2);
    for level in 1..=depth - 2 {
        let fine_n = ladder.n_at(level + 1);
        let gc_threshold = (ladder.m_at(level + 2) as f64).powf(1.0 - tau / 2.0);
        let gc_ok = descendant_count_ok(
            &good[level],
            fine_n,
            ladder.m_at(level + 2),
            ladder.child_window(level + 2),
            gc_threshold,
        );
        let qualified: Vec<bool> = good[level - 1]
            .mask
            .iter()
            .zip(&gc_ok)
            .map(|(&g, &ok)| g && ok)
            .collect();
        let pref = prefix_counts(&qualified);
        let child_threshold = (ladder.m_at(level + 1) as f64).powf(1.0 - tau);
        let m_into = ladder.m_at(level + 1);
        let w_into = ladder.child_window(level + 1);
        let this_n = ladder.n_at(level);
        let count_ok = |theta: usize| {
            let center = (theta as u64 * m_into) % fine_n;
            (count_window(&pref, fine_n, center, w_into) as f64) >= child_threshold
        };
        let mask: Vec<bool> = if level == 1 {
            (0..this_n as usize).map(count_ok).collect()
        } else {
            let m_own = ladder.m_at(level);
            let w_own = ladder.child_window(level);
            let coarse_n = ladder.n_at(level - 1);
            let parent_ok = &healthy[level - 2];
            (0..this_n as usize)
                .map(|theta| {
                    if !good[level - 2].mask[theta] {
                        return false;
                    }
                    let (p_raw, off) = window_offset(theta, m_own);
                    off <= w_own
                        && parent_ok[(p_raw % coarse_n) as usize]
                        && count_ok(theta)
                })
                .collect()
        };
        healthy.push(mask);
    }
    Ok(healthy)
}

/// Checks the containment of healthy sets in alive sets, levelwise.
pub fn healthy_within_alive(levels: &BranchLevels, healthy: &[Vec<bool>]) -> bool {
    healthy.iter().enumerate().all(|(i, h)| {
        h.iter()
            .zip(&levels.alive[i])
            .all(|(&hh, &aa)| !hh || aa)
    })
}

/// Widened closed intervals around the marked slots of each scale.
pub fn survivor_intervals(ladder: &ScaleLadder, sets: &[Vec<bool>]) -> Result<Vec<IntervalSet>> {
    let mut out = Vec::with_capacity(sets.len());
    for (i, mask) in sets.iter().enumerate() {
        let k = i + 1;
        let n = ladder.n_at(k);
        if mask.len() as u64 != n {
            return Err(Error::InvalidParameter(format!(
                "set {i} has {} slots, scale {k} has {n}",
                mask.len()
            )));
        }
        let radius = ladder.widen_radius(k);
        let centers: Vec<f64> = mask
            .iter()
            .enumerate()
            .filter_map(|(s, &b)| b.then(|| t_of(s, n) as f64 / n as f64))
            .collect();
        out.push(IntervalSet::from_points(&centers, radius)?);
    }
    Ok(out)
}

/// Per-transition nesting margin: with the widened radius
/// `r_k = N_k^{-1} (ln N_k)^{-beta_widen}` and the child-candidate radius
/// `N_k^{-1} (ln N_k)^{-beta_child}`, a child interval stays inside its
/// parent's when
/// `(ln N_k)^{bw - bc} + (N_k (ln N_k)^{-bw}) / (N_{k+1} (ln N_{k+1})^{-bw}) <= 1`.
#[derive(Clone, Debug)]
pub struct NestingReport {
    /// Left-hand side per transition `k = 1..K-1`.
    pub lhs: Vec<f64>,
    pub ok: bool,
}

pub fn nesting_check(ladder: &ScaleLadder) -> NestingReport {
    let bw = ladder.config.beta_widen;
    let bc = ladder.config.beta_child;
    let mut lhs = Vec::with_capacity(ladder.depth() - 1);
    for k in 1..ladder.depth() {
        let n0 = ladder.n_at(k) as f64;
        let n1 = ladder.n_at(k + 1) as f64;
        let term1 = n0.ln().powf(bw - bc);
        let term2 = (n0 * n0.ln().powf(-bw)) / (n1 * n1.ln().powf(-bw));
        lhs.push(term1 + term2);
    }
    let ok = lhs.iter().all(|&v| v <= 1.0);
    NestingReport { lhs, ok }
}
