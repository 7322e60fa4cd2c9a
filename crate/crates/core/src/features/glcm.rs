//! Gray-level co-occurrence matrix averaged over the 13 directions.

use crate::error::{Error, Result};
use crate::volume::DiscretizedVolume;

use super::{finite, DirectionSet13, Named};

/// Normalized, symmetric co-occurrence matrix, `ng x ng` row-major with
/// level `i` at row `i - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    pub ng: usize,
    pub p: Vec<f64>,
    /// Number of ordered co-occurrences accumulated over all directions.
    pub pairs: u64,
}

impl Glcm {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[(i - 1) * self.ng + (j - 1)]
    }

    pub fn is_normalized(&self) -> bool {
        let s: f64 = self.p.iter().sum();
        (s - 1.0).abs() <= 1e-12
    }
}

/// Symmetric co-occurrence counts for one offset: both `(i, j)` and `(j, i)`
/// are counted for every in-VOI pair `(x, x + offset)`.
pub fn glcm_counts(disc: &DiscretizedVolume, offset: [i64; 3]) -> Vec<u64> {
    let ng = disc.ng as usize;
    let g = disc.grid;
    let mut counts = vec![0u64; ng * ng];
    for (idx, &a) in disc.levels.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let Some(j) = g.offset_index(g.coords(idx), offset) else {
            continue;
        };
        let b = disc.levels[j];
        if b == 0 {
            continue;
        }
        let (a, b) = (a as usize - 1, b as usize - 1);
        counts[a * ng + b] += 1;
        counts[b * ng + a] += 1;
    }
    counts
}

/// Element-wise mean of the per-direction matrices at the given Chebyshev
/// distance, normalized to sum 1.
pub fn glcm_mean(disc: &DiscretizedVolume, dirs: &DirectionSet13, distance: i64) -> Glcm {
    let ng = disc.ng as usize;
    let mut total = vec![0u64; ng * ng];
    for d in dirs.iter() {
        let off = [d[0] * distance, d[1] * distance, d[2] * distance];
        for (t, c) in total.iter_mut().zip(glcm_counts(disc, off)) {
            *t += c;
        }
    }
    normalize(ng, &total)
}

pub(crate) fn normalize(ng: usize, summed: &[u64]) -> Glcm {
    let pairs: u64 = summed.iter().sum();
    let p = if pairs == 0 {
        vec![0.0; ng * ng]
    } else {
        let denom = pairs as f64;
        summed.iter().map(|&c| c as f64 / denom).collect()
    };
    Glcm { ng, p, pairs }
}

pub const GLCM_NAMES: [&str; 10] = [
    "Variance",
    "Energy",
    "Entropy",
    "Correlation",
    "Dissimilarity",
    "Contrast",
    "Homogeneity",
    "IDM",
    "ClusterShade",
    "ClusterTendency",
];

pub fn glcm_features(m: &Glcm) -> Result<Named> {
    if m.pairs == 0 {
        return Ok(GLCM_NAMES.iter().map(|&n| (n, None)).collect());
    }
    if !m.is_normalized() {
        return Err(Error::Unnormalized(m.p.iter().sum()));
    }
    let ng = m.ng;
    let (mut mu_x, mut mu_y) = (0.0, 0.0);
    for i in 1..=ng {
        for j in 1..=ng {
            let p = m.at(i, j);
            mu_x += i as f64 * p;
            mu_y += j as f64 * p;
        }
    }
    let (mut var_x, mut var_y, mut cov) = (0.0, 0.0, 0.0);
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut dissimilarity = 0.0;
    let mut contrast = 0.0;
    let mut homogeneity = 0.0;
    let mut idm = 0.0;
    let mut shade = 0.0;
    let mut tendency = 0.0;
    for i in 1..=ng {
        for j in 1..=ng {
            let p = m.at(i, j);
            if p == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            let dx = fi - mu_x;
            let dy = fj - mu_y;
            var_x += dx * dx * p;
            var_y += dy * dy * p;
            cov += dx * dy * p;
            energy += p * p;
            entropy -= p * p.log2();
            let diff = (fi - fj).abs();
            dissimilarity += diff * p;
            contrast += diff * diff * p;
            homogeneity += p / (1.0 + diff);
            idm += p / (1.0 + diff * diff);
            let s = fi + fj - mu_x - mu_y;
            shade += s * s * s * p;
            tendency += s * s * p;
        }
    }
    let correlation = if var_x > 0.0 && var_y > 0.0 {
        finite(cov / (var_x.sqrt() * var_y.sqrt()))
    } else {
        None
    };
    let values = [
        Some(var_x),
        Some(energy),
        Some(entropy),
        correlation,
        Some(dissimilarity),
        Some(contrast),
        Some(homogeneity),
        Some(idm),
        Some(shade),
        Some(tendency),
    ];
    Ok(GLCM_NAMES.iter().copied().zip(values).collect())
}
