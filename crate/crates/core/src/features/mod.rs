//! The 49 classical radiomics features: 11 first-order, sphericity, and 37
//! texture features from GLCM, GLRLM, GLSZM and GLDM.

mod directions;
mod first_order;
mod glcm;
mod gldm;
mod glrlm;
mod glszm;
mod shape;

pub use directions::{neighbors26, DirectionSet13};
pub use first_order::{first_order, Moments, FIRST_ORDER_NAMES};
pub use glcm::{glcm_counts, glcm_features, glcm_mean, Glcm, GLCM_NAMES};
pub use gldm::{gldm, gldm_features, Gldm, COARSENESS_CAP, GLDM_NAMES};
pub use glrlm::{glrlm_features, glrlm_mean, run_counts, Glrlm, RunCounts, GLRLM_NAMES};
pub use glszm::{glszm, glszm_features, Glszm, GLSZM_NAMES};
pub use shape::{sphericity, surface_area};

use crate::error::Result;
use crate::volume::{check_pair, DiscretizedVolume, ScalarVolume, VoiMask};

/// Feature values keyed by short name; `None` is a missing value.
pub type Named = Vec<(&'static str, Option<f64>)>;

pub const CLASSICAL_FEATURE_COUNT: usize = 49;

#[inline]
pub(crate) fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Shannon entropy in bits of a count histogram.
pub(crate) fn entropy_bits(hist: &[u64]) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let mut h = 0.0;
    for &c in hist {
        if c > 0 {
            let p = c as f64 / t;
            h -= p * p.log2();
        }
    }
    // -0.0 for a single bin
    h + 0.0
}

/// The 11 emphasis/non-uniformity features shared by run-length and
/// size-zone matrices. `m` is `ng x lmax` row-major, column `k` holding
/// runs/zones of size `k + 1`.
///
/// Order: short, long, low-gray, high-gray, short-low, long-low, short-high,
/// long-high emphases, percentage, gray-level non-uniformity, size
/// non-uniformity.
pub(crate) fn size_emphasis(m: &[f64], ng: usize, lmax: usize, voxels: usize) -> [Option<f64>; 11] {
    let total: f64 = m.iter().sum();
    if total == 0.0 || voxels == 0 {
        return [None; 11];
    }
    let mut acc = [0.0f64; 8];
    let mut row = vec![0.0; ng];
    let mut col = vec![0.0; lmax];
    for i in 0..ng {
        let gi = (i + 1) as f64;
        let gi2 = gi * gi;
        for k in 0..lmax {
            let c = m[i * lmax + k];
            if c == 0.0 {
                continue;
            }
            let s = (k + 1) as f64;
            let s2 = s * s;
            acc[0] += c / s2;
            acc[1] += c * s2;
            acc[2] += c / gi2;
            acc[3] += c * gi2;
            acc[4] += c / (gi2 * s2);
            acc[5] += c * s2 / gi2;
            acc[6] += c * gi2 / s2;
            acc[7] += c * gi2 * s2;
            row[i] += c;
            col[k] += c;
        }
    }
    let glnu: f64 = row.iter().map(|r| r * r).sum::<f64>() / total;
    let snu: f64 = col.iter().map(|r| r * r).sum::<f64>() / total;
    let mut out = [None; 11];
    for (o, a) in out.iter_mut().zip(acc) {
        *o = finite(a / total);
    }
    out[8] = finite(total / voxels as f64);
    out[9] = finite(glnu);
    out[10] = finite(snu);
    out
}

/// All 49 classical features with stable names `CR.<group>.<name>`.
///
/// `vol` should already be resampled; `disc` is the discretization of the
/// same pair.
pub fn classical_features(
    vol: &ScalarVolume,
    mask: &VoiMask,
    disc: &DiscretizedVolume,
) -> Result<Vec<(String, Option<f64>)>> {
    check_pair(vol, mask)?;
    let dirs = DirectionSet13::canonical();
    let mut out = Vec::with_capacity(CLASSICAL_FEATURE_COUNT);
    let mut push = |group: &str, named: Named| {
        for (n, v) in named {
            out.push((format!("CR.{group}.{n}"), v));
        }
    };
    push("FO", first_order(vol, mask, disc)?);
    push("SHAPE", vec![("sphericity", Some(sphericity(mask)?))]);
    push("GLCM", glcm_features(&glcm_mean(disc, &dirs, 1))?);
    push("GLRLM", glrlm_features(&glrlm_mean(disc, &dirs, 1)));
    push("GLSZM", glszm_features(&glszm(disc)));
    push("GLDM", gldm_features(&gldm(disc)));
    debug_assert_eq!(out.len(), CLASSICAL_FEATURE_COUNT);
    Ok(out)
}

/// The 49 classical feature names in output order.
pub fn classical_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(CLASSICAL_FEATURE_COUNT);
    names.extend(FIRST_ORDER_NAMES.iter().map(|n| format!("CR.FO.{n}")));
    names.push("CR.SHAPE.sphericity".to_string());
    names.extend(GLCM_NAMES.iter().map(|n| format!("CR.GLCM.{n}")));
    names.extend(GLRLM_NAMES.iter().map(|n| format!("CR.GLRLM.{n}")));
    names.extend(GLSZM_NAMES.iter().map(|n| format!("CR.GLSZM.{n}")));
    names.extend(GLDM_NAMES.iter().map(|n| format!("CR.GLDM.{n}")));
    names
}
