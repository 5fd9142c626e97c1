//! The constructed measure: exact rational masses split along healthy
//! chains, with a sink absorbing everything that leaves the construction.
//!
//! Mass starts uniformly on the healthy points of the first net. Each push
//! splits a point's mass equally over its child set `U` (children whose own
//! child windows hold enough good grandchildren); shares landing on healthy
//! children attach to their widened intervals, all other shares go to the
//! sink. Conservation is exact at every stage by construction and asserted
//! in rational arithmetic.
//!
//! Every massive point is healthy, so its healthy count condition forces
//! `|U| >= M^{1-tau}`; the per-interval product bound
//! `mass <= prod_{j<=l} M_j^{-(1-tau)}` (with `M_1 := N_1`) follows by
//! induction and is checked here, exactly for integer `tau` and in log
//! space with a 1e-12 slack otherwise.

use crate::branching::{count_window, prefix_counts};
use crate::error::{Error, Result};
use crate::goodness::GoodMask;
use crate::ladder::ScaleLadder;
use crate::sums::t_of;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// One massive interval: a widened point of some net.
#[derive(Clone, Debug)]
pub struct MeasureAtom {
    pub scale: usize,
    pub slot: usize,
    /// `t / N` for the slot's net index.
    pub center: f64,
    /// The widened radius of the atom's scale.
    pub half_width: f64,
    pub mass: BigRational,
}

/// The measure after attaching at one level: atoms on that net plus the
/// cumulative sink.
#[derive(Clone, Debug)]
pub struct MeasureLevel {
    pub scale: usize,
    pub atoms: Vec<MeasureAtom>,
    pub sink: BigRational,
}

impl MeasureLevel {
    pub fn total(&self) -> BigRational {
        self.atoms
            .iter()
            .fold(self.sink.clone(), |acc, a| acc + &a.mass)
    }
}

/// A mass split whose child set was empty: the construction failed at this
/// point and its whole mass went to the sink.
#[derive(Clone, Debug)]
pub struct SinkEvent {
    pub from_scale: usize,
    pub slot: usize,
    pub mass: BigRational,
}

/// The measure along its levels, with the empty-child-set log.
#[derive(Clone, Debug)]
pub struct FrostmanMeasure {
    pub levels: Vec<MeasureLevel>,
    pub empty_child_events: Vec<SinkEvent>,
}

impl FrostmanMeasure {
    pub fn final_level(&self) -> &MeasureLevel {
        self.levels.last().expect("measure has at least one level")
    }

    /// The deepest level that still owns interval atoms (the final level
    /// when nothing attached anywhere is level 1 with no atoms).
    pub fn deepest_with_atoms(&self) -> Option<&MeasureLevel> {
        self.levels.iter().rev().find(|l| !l.atoms.is_empty())
    }

    /// Uniform pieces `(lo, hi, mass)` of one level's atoms, wrap-split on
    /// the circle with exact proportional mass division.
    pub fn pieces_at(&self, level_index: usize) -> Vec<(f64, f64, BigRational)> {
        let mut out = Vec::new();
        for atom in &self.levels[level_index].atoms {
            let lo = atom.center - atom.half_width;
            let hi = atom.center + atom.half_width;
            if lo >= 0.0 && hi <= 1.0 {
                out.push((lo, hi, atom.mass.clone()));
                continue;
            }
            let width = BigRational::from_float(hi).unwrap() - BigRational::from_float(lo).unwrap();
            let push_part = |a: f64, b: f64, shift: f64, out: &mut Vec<(f64, f64, BigRational)>| {
                if b > a {
                    let frac = (BigRational::from_float(b).unwrap()
                        - BigRational::from_float(a).unwrap())
                        / &width;
                    out.push((a + shift, b + shift, &atom.mass * frac));
                }
            };
            push_part(lo.max(0.0), hi.min(1.0), 0.0, &mut out);
            if lo < 0.0 {
                push_part(lo, 0.0f64.min(hi), 1.0, &mut out);
            }
            if hi > 1.0 {
                push_part(1.0f64.max(lo), hi, -1.0, &mut out);
            }
        }
        out
    }
}

fn atom(ladder: &ScaleLadder, scale: usize, slot: usize, mass: BigRational) -> MeasureAtom {
    let n = ladder.n_at(scale);
    MeasureAtom {
        scale,
        slot,
        center: t_of(slot, n) as f64 / n as f64,
        half_width: ladder.widen_radius(scale),
        mass,
    }
}

/// Initial measure: mass `1/N_1` on each healthy first-net point, the rest
/// in the sink.
pub fn init_measure(ladder: &ScaleLadder, healthy_root: &[bool]) -> Result<MeasureLevel> {
    let n = ladder.n_at(1);
    if healthy_root.len() as u64 != n {
        return Err(Error::InvalidParameter(format!(
            "root mask has {} slots, first net has {n}",
            healthy_root.len()
        )));
    }
    let unit = BigRational::new(BigInt::one(), BigInt::from(n));
    let atoms: Vec<MeasureAtom> = healthy_root
        .iter()
        .enumerate()
        .filter_map(|(s, &h)| h.then(|| atom(ladder, 1, s, unit.clone())))
        .collect();
    let sink = BigRational::one() - &unit * BigInt::from(atoms.len());
    Ok(MeasureLevel {
        scale: 1,
        atoms,
        sink,
    })
}

/// Pushes the measure from level `l` to `l + 1`.
///
/// For each massive point: `U` collects the child-window slots whose own
/// windows into scale `l + 2` hold at least `M_{l+2}^{1 - tau/2}` good
/// points. Mass splits equally over `U`; healthy children keep their share,
/// the rest sinks. An empty `U` sinks the whole mass and is logged.
pub fn frostman_push(
    ladder: &ScaleLadder,
    level: &MeasureLevel,
    good: &[GoodMask],
    healthy_next: &[bool],
    tau: f64,
) -> Result<(MeasureLevel, Vec<SinkEvent>)> {
    let l = level.scale;
    if l + 2 > ladder.depth() {
        return Err(Error::ScaleOutOfRange {
            index: l + 2,
            depth: ladder.depth(),
        });
    }
    let fine_n = ladder.n_at(l + 1);
    if healthy_next.len() as u64 != fine_n {
        return Err(Error::InvalidParameter(format!(
            "healthy mask has {} slots, scale {} has {fine_n}",
            healthy_next.len(),
            l + 1
        )));
    }
    let m_into = ladder.m_at(l + 1);
    let w_into = ladder.child_window(l + 1);
    let gc_mask = &good[l]; // scale l + 2
    let gc_pref = prefix_counts(&gc_mask.mask);
    let gc_threshold = (ladder.m_at(l + 2) as f64).powf(1.0 - tau / 2.0);
    let m_gc = ladder.m_at(l + 2);
    let w_gc = ladder.child_window(l + 2);
    let child_qualifies = |phi: u64| {
        let center = (phi * m_gc) % gc_mask.net_n;
        (count_window(&gc_pref, gc_mask.net_n, center, w_gc) as f64) >= gc_threshold
    };

    let mut attached: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut sink = level.sink.clone();
    let mut events = Vec::new();
    for parent in &level.atoms {
        if parent.mass.is_zero() {
            continue;
        }
        let center = (parent.slot as u64 * m_into) % fine_n;
        let mut u_slots: Vec<u64> = Vec::with_capacity(2 * w_into as usize + 1);
        let lo = center + fine_n - w_into;
        for d in 0..=2 * w_into {
            let phi = (lo + d) % fine_n;
            if child_qualifies(phi) {
                u_slots.push(phi);
            }
        }
        if u_slots.is_empty() {
            sink += &parent.mass;
            events.push(SinkEvent {
                from_scale: l,
                slot: parent.slot,
                mass: parent.mass.clone(),
            });
            continue;
        }
        let share = &parent.mass / BigInt::from(u_slots.len());
        for &phi in &u_slots {
            if healthy_next[phi as usize] {
                *attached.entry(phi as usize).or_insert_with(BigRational::zero) += &share;
            } else {
                sink += &share;
            }
        }
    }
    let atoms: Vec<MeasureAtom> = attached
        .into_iter()
        .map(|(slot, mass)| atom(ladder, l + 1, slot, mass))
        .collect();
    Ok((
        MeasureLevel {
            scale: l + 1,
            atoms,
            sink,
        },
        events,
    ))
}

/// Runs the full measure pipeline over the provided healthy levels
/// (`healthy[i]` is the mask of level `i + 1`; levels end at depth - 2).
pub fn build_measure(
    ladder: &ScaleLadder,
    good: &[GoodMask],
    healthy: &[Vec<bool>],
    tau: f64,
) -> Result<FrostmanMeasure> {
    if healthy.is_empty() {
        return Err(Error::InvalidParameter(
            "measure needs at least one healthy level (depth >= 3)".into(),
        ));
    }
    let mut levels = vec![init_measure(ladder, &healthy[0])?];
    let mut empty_child_events = Vec::new();
    for target in 2..=healthy.len() {
        let (next, mut ev) = frostman_push(
            ladder,
            levels.last().unwrap(),
            good,
            &healthy[target - 1],
            tau,
        )?;
        empty_child_events.append(&mut ev);
        levels.push(next);
    }
    let measure = FrostmanMeasure {
        levels,
        empty_child_events,
    };
    for level in &measure.levels {
        if level.total() != BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "mass leak at scale {}: total {}",
                level.scale,
                level.total()
            )));
        }
    }
    Ok(measure)
}

/// The per-interval ceiling `prod_{j<=l} M_j^{-(1-tau)}` with `M_1 := N_1`,
/// as an exact rational for integer `tau`.
pub fn product_bound_exact(ladder: &ScaleLadder, level: usize, tau_int: u32) -> BigRational {
    let mut denom = BigInt::one();
    for j in 1..=level {
        let m = if j == 1 {
            ladder.n_at(1)
        } else {
            ladder.m_at(j)
        };
        if tau_int < 1 {
            denom *= BigInt::from(m).pow(1 - tau_int);
        }
    }
    BigRational::new(BigInt::one(), denom)
}

/// Natural log of the per-interval ceiling for general `tau`.
pub fn product_bound_ln(ladder: &ScaleLadder, level: usize, tau: f64) -> f64 {
    let mut acc = 0.0;
    for j in 1..=level {
        let m = if j == 1 {
            ladder.n_at(1)
        } else {
            ladder.m_at(j)
        };
        acc -= (1.0 - tau) * (m as f64).ln();
    }
    acc
}

/// Verifies every atom of every level against the product ceiling: exact
/// rational comparison when `tau` is integer, log-space with 1e-12 slack
/// otherwise. Returns the worst slack found (negative when comfortably
/// inside the bound).
pub fn check_interval_bound(
    ladder: &ScaleLadder,
    measure: &FrostmanMeasure,
    tau: f64,
) -> Result<f64> {
    let tau_int = if tau.fract() == 0.0 && (0.0..=1.0).contains(&tau) {
        Some(tau as u32)
    } else {
        None
    };
    let mut worst = f64::NEG_INFINITY;
    for (i, level) in measure.levels.iter().enumerate() {
        let l = i + 1;
        match tau_int {
            Some(ti) => {
                let bound = product_bound_exact(ladder, l, ti);
                for a in &level.atoms {
                    if a.mass > bound {
                        return Err(Error::InvalidParameter(format!(
                            "atom at scale {l} slot {} exceeds exact bound",
                            a.slot
                        )));
                    }
                    let gap = a.mass.to_f64().unwrap_or(0.0).ln()
                        - bound.to_f64().unwrap_or(1.0).ln();
                    worst = worst.max(gap);
                }
            }
            None => {
                let bound_ln = product_bound_ln(ladder, l, tau);
                for a in &level.atoms {
                    let mass_ln = a.mass.to_f64().unwrap_or(0.0).ln();
                    if mass_ln > bound_ln + 1e-12 {
                        return Err(Error::InvalidParameter(format!(
                            "atom at scale {l} slot {} exceeds bound: ln mass {mass_ln} > {bound_ln}",
                            a.slot
                        )));
                    }
                    worst = worst.max(mass_ln - bound_ln);
                }
            }
        }
    }
    Ok(worst)
}
