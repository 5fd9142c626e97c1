//! Joint-versus-product probabilities of symmetric convex sets under a
//! standard Gaussian vector: the joint probability should never fall below
//! the product. The set family (origin-symmetric boxes, slabs, ellipsoids)
//! keeps membership tests exact; the margin's error bar comes from the
//! delta method on the three correlated indicator means.

use super::seed_labels;
use crate::error::{Error, Result};
use crate::noise::{derive_seed, NoiseStream, StreamId};
use serde::Serialize;

pub const MAX_DIMENSION: usize = 8;

#[derive(Clone, Debug)]
pub enum ConvexSet {
    /// `|x_i| <= half_widths[i]` for every coordinate.
    Box { half_widths: Vec<f64> },
    /// `|<normal, x>| <= half_width`.
    Slab { normal: Vec<f64>, half_width: f64 },
    /// `sum_i (<axes[i], x> / radii[i])^2 <= 1`; fewer axes than
    /// dimensions give a cylinder.
    Ellipsoid {
        axes: Vec<Vec<f64>>,
        radii: Vec<f64>,
    },
}

impl ConvexSet {
    pub fn validate(&self, d: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            ConvexSet::Box { half_widths } => {
                if half_widths.len() != d {
                    return bad(format!("box has {} widths in dimension {d}", half_widths.len()));
                }
                if half_widths.iter().any(|h| !(*h > 0.0)) {
                    return bad("box half-widths must be positive".into());
                }
            }
            ConvexSet::Slab { normal, half_width } => {
                if normal.len() != d {
                    return bad(format!("slab normal has {} entries in dimension {d}", normal.len()));
                }
                if !(normal.iter().map(|v| v * v).sum::<f64>() > 0.0) {
                    return bad("slab normal must be nonzero".into());
                }
                if !(*half_width > 0.0) {
                    return bad("slab half-width must be positive".into());
                }
            }
            ConvexSet::Ellipsoid { axes, radii } => {
                if axes.is_empty() || axes.len() != radii.len() {
                    return bad("ellipsoid needs matching nonempty axes and radii".into());
                }
                if axes.iter().any(|a| a.len() != d) {
                    return bad(format!("ellipsoid axis length mismatch in dimension {d}"));
                }
                if radii.iter().any(|r| !(*r > 0.0)) {
                    return bad("ellipsoid radii must be positive".into());
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexSet::Box { half_widths } => x
                .iter()
                .zip(half_widths)
                .all(|(v, h)| v.abs() <= *h),
            ConvexSet::Slab { normal, half_width } => {
                let dot: f64 = normal.iter().zip(x).map(|(n, v)| n * v).sum();
                dot.abs() <= *half_width
            }
            ConvexSet::Ellipsoid { axes, radii } => {
                let q: f64 = axes
                    .iter()
                    .zip(radii)
                    .map(|(a, r)| {
                        let dot: f64 = a.iter().zip(x).map(|(ai, v)| ai * v).sum();
                        (dot / r) * (dot / r)
                    })
                    .sum();
                q <= 1.0
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GciReport {
    pub p_joint: f64,
    pub p_k: f64,
    pub p_l: f64,
    pub margin: f64,
    /// Delta-method standard error of `p_joint - p_k * p_l`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

pub fn gci_check_mc(
    d: usize,
    k: &ConvexSet,
    l: &ConvexSet,
    trials: u64,
    master_seed: u64,
) -> Result<GciReport> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::InvalidParameter(format!(
            "dimension {d} outside 1..={MAX_DIMENSION}"
        )));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("trials must be >= 2".into()));
    }
    k.validate(d)?;
    l.validate(d)?;
    let mut n_joint = 0u64;
    let mut n_k = 0u64;
    let mut n_l = 0u64;
    let mut x = vec![0.0f64; d];
    for trial in 0..trials {
        let stream = NoiseStream::new(
            derive_seed(master_seed, seed_labels::GCI, trial),
            StreamId::Gaussian,
        );
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = stream.gaussian_at(i as u64 + 1);
        }
        let in_k = k.contains(&x);
        let in_l = l.contains(&x);
        n_k += in_k as u64;
        n_l += in_l as u64;
        n_joint += (in_k && in_l) as u64;
    }
    let t = trials as f64;
    let (pj, pk, pl) = (n_joint as f64 / t, n_k as f64 / t, n_l as f64 / t);
    // Covariances of the three indicators follow from the inclusion
    // structure: E[1_joint 1_K] = p_joint, E[1_K 1_L] = p_joint.
    let c11 = pj * (1.0 - pj);
    let c12 = pj * (1.0 - pk);
    let c13 = pj * (1.0 - pl);
    let c22 = pk * (1.0 - pk);
    let c33 = pl * (1.0 - pl);
    let c23 = pj - pk * pl;
    let var = c11 + pl * pl * c22 + pk * pk * c33 - 2.0 * pl * c12 - 2.0 * pk * c13
        + 2.0 * pk * pl * c23;
    Ok(GciReport {
        p_joint: pj,
        p_k: pk,
        p_l: pl,
        margin: pj - pk * pl,
        stderr: (var.max(0.0) / t).sqrt(),
        trials,
        seed: master_seed,
    })
}

/// Orthonormalizes the rows; `None` when they are linearly dependent.
pub fn gram_schmidt(mut rows: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    for i in 0..rows.len() {
        for j in 0..i {
            let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            let prev = rows[j].clone();
            for (v, p) in rows[i].iter_mut().zip(&prev) {
                *v -= dot * p;
            }
        }
        let norm: f64 = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return None;
        }
        for v in rows[i].iter_mut() {
            *v /= norm;
        }
    }
    Some(rows)
}

/// A pair of randomly rotated slabs with half-widths in `[0.3, 1.8]`.
pub fn random_slab_pair(master_seed: u64, index: u64, d: usize) -> (ConvexSet, ConvexSet) {
    let seed = derive_seed(master_seed, seed_labels::GCI, index << 8);
    let aux = NoiseStream::new(seed, StreamId::Auxiliary(7));
    let make = |offset: u64| {
        let raw: Vec<f64> = (0..d)
            .map(|i| {
                let (g, _) = aux.gaussian_pair_at(offset + i as u64);
                g
            })
            .collect();
        let unit = gram_schmidt(vec![raw])
            .map(|r| r.into_iter().next().unwrap())
            .unwrap_or_else(|| {
                let mut e = vec![0.0; d];
                e[0] = 1.0;
                e
            });
        let width = 0.3 + 1.5 * aux.open01_at(offset + 1000);
        ConvexSet::Slab {
            normal: unit,
            half_width: width,
        }
    };
    (make(0), make(100))
}
