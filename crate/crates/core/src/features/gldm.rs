//! Neighborhood gray-tone difference statistics, reported under the GLDM
//! feature names (Coarseness, Contrast, Busyness, Complexity, Strength).

use crate::volume::DiscretizedVolume;

use super::{finite, neighbors26, Named};

/// Value reported for Coarseness when `Σ p_i s_i = 0`.
pub const COARSENESS_CAP: f64 = 1e6;

/// Per-level statistics, index `i - 1` for level `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gldm {
    pub ng: usize,
    /// Voxels of each level that have at least one in-VOI neighbor.
    pub n: Vec<u64>,
    /// Sum over those voxels of `|i - mean neighbor level|`.
    pub s: Vec<f64>,
    /// `n_i / Σ n`.
    pub p: Vec<f64>,
    /// `Σ n`.
    pub counted: u64,
}

/// Builds the per-level sums using the in-VOI 26-neighborhood of each voxel.
/// Voxels with no in-VOI neighbor are skipped.
pub fn gldm(disc: &DiscretizedVolume) -> Gldm {
    let ng = disc.ng as usize;
    let g = disc.grid;
    let offsets: Vec<[i64; 3]> = neighbors26().collect();
    let mut n = vec![0u64; ng];
    let mut s = vec![0.0; ng];
    for (idx, &l) in disc.levels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let p = g.coords(idx);
        let mut sum = 0u64;
        let mut cnt = 0u64;
        for &o in &offsets {
            if let Some(j) = g.offset_index(p, o) {
                let lj = disc.levels[j];
                if lj > 0 {
                    sum += u64::from(lj);
                    cnt += 1;
                }
            }
        }
        if cnt == 0 {
            continue;
        }
        let mean = sum as f64 / cnt as f64;
        n[l as usize - 1] += 1;
        s[l as usize - 1] += (f64::from(l) - mean).abs();
    }
    let counted: u64 = n.iter().sum();
    let p = n
        .iter()
        .map(|&c| if counted == 0 { 0.0 } else { c as f64 / counted as f64 })
        .collect();
    Gldm {
        ng,
        n,
        s,
        p,
        counted,
    }
}

pub const GLDM_NAMES: [&str; 5] = ["Coarseness", "Contrast", "Busyness", "Complexity", "Strength"];

pub fn gldm_features(g: &Gldm) -> Named {
    if g.counted == 0 {
        return GLDM_NAMES.iter().map(|&n| (n, None)).collect();
    }
    let levels: Vec<usize> = (0..g.ng).filter(|&i| g.p[i] > 0.0).collect();
    let ngp = levels.len() as f64;
    let nvc = g.counted as f64;
    let ps: f64 = levels.iter().map(|&i| g.p[i] * g.s[i]).sum();
    let s_total: f64 = levels.iter().map(|&i| g.s[i]).sum();

    let coarseness = if ps == 0.0 { COARSENESS_CAP } else { (1.0 / ps).min(COARSENESS_CAP) };

    let mut pair_sq = 0.0;
    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength_num = 0.0;
    for &a in &levels {
        for &b in &levels {
            let (ia, ib) = ((a + 1) as f64, (b + 1) as f64);
            let (pa, pb) = (g.p[a], g.p[b]);
            let d2 = (ia - ib) * (ia - ib);
            pair_sq += pa * pb * d2;
            busy_den += (ia * pa - ib * pb).abs();
            complexity += (ia - ib).abs() * (pa * g.s[a] + pb * g.s[b]) / (pa + pb);
            strength_num += (pa + pb) * d2;
        }
    }
    let contrast = if levels.len() > 1 {
        Some(pair_sq / (ngp * (ngp - 1.0)) * s_total / nvc)
    } else {
        Some(0.0)
    };
    let busyness = if busy_den > 0.0 { finite(ps / busy_den) } else { None };
    let complexity = Some(complexity / nvc);
    let strength = if s_total > 0.0 { finite(strength_num / s_total) } else { None };
    let values = [Some(coarseness), contrast, busyness, complexity, strength];
    GLDM_NAMES.iter().copied().zip(values).collect()
}
