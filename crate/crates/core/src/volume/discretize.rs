use serde::{Deserialize, Serialize};

use super::{check_pair, Grid, ScalarVolume, VoiMask};
use crate::error::{Error, Result};

/// Gray-level binning rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinPolicy {
    /// `N` equal-width bins spanning the VOI intensity range.
    FixedBinCount(u32),
    /// Bins of width `w` starting at the VOI minimum.
    FixedBinSize(f64),
}

impl Default for BinPolicy {
    fn default() -> Self {
        BinPolicy::FixedBinCount(32)
    }
}

/// Gray levels `1..=ng` for in-mask voxels; `0` marks voxels outside the VOI.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedVolume {
    pub grid: Grid,
    pub levels: Vec<u32>,
    pub ng: u32,
    pub edges: Vec<f64>,
}

impl DiscretizedVolume {
    #[inline]
    pub fn level(&self, x: usize, y: usize, z: usize) -> u32 {
        self.levels[self.grid.index(x, y, z)]
    }

    /// Voxel count per level, index 0 unused.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.ng as usize + 1];
        for &l in &self.levels {
            if l > 0 {
                h[l as usize] += 1;
            }
        }
        h
    }

    pub fn voxel_count(&self) -> usize {
        self.levels.iter().filter(|&&l| l > 0).count()
    }
}

/// Discretizes the in-mask intensities of `vol`.
pub fn discretize(vol: &ScalarVolume, mask: &VoiMask, policy: BinPolicy) -> Result<DiscretizedVolume> {
    check_pair(vol, mask)?;
    discretize_values(vol.grid, &vol.values, &mask.values, policy)
}

pub(crate) fn discretize_values(
    grid: Grid,
    values: &[f64],
    mask: &[bool],
    policy: BinPolicy,
) -> Result<DiscretizedVolume> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (&v, &m) in values.iter().zip(mask) {
        if m {
            min = min.min(v);
            max = max.max(v);
        }
    }
    if min > max {
        return Err(Error::EmptyVoi);
    }
    if let BinPolicy::FixedBinSize(w) = policy {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!("bin width must be > 0, got {w}")));
        }
    }
    if let BinPolicy::FixedBinCount(n) = policy {
        if n == 0 {
            return Err(Error::InvalidParameter("bin count must be >= 1".into()));
        }
        if n < 2 && max > min {
            log::warn!("discretizing a non-constant VOI into a single bin");
        }
    }

    let mut levels = vec![0u32; values.len()];
    if min == max {
        for (l, &m) in levels.iter_mut().zip(mask) {
            if m {
                *l = 1;
            }
        }
        let width = match policy {
            BinPolicy::FixedBinSize(w) => w,
            BinPolicy::FixedBinCount(_) => 1.0,
        };
        return Ok(DiscretizedVolume {
            grid,
            levels,
            ng: 1,
            edges: vec![min, min + width],
        });
    }

    let range = max - min;
    let (ng, edges) = match policy {
        BinPolicy::FixedBinCount(n) => {
            for ((l, &v), &m) in levels.iter_mut().zip(values).zip(mask) {
                if m {
                    let raw = (f64::from(n) * (v - min) / range).floor() as i64 + 1;
                    *l = raw.clamp(1, i64::from(n)) as u32;
                }
            }
            let edges = (0..=n)
                .map(|k| {
                    if k == n {
                        max
                    } else {
                        min + range * f64::from(k) / f64::from(n)
                    }
                })
                .collect();
            (n, edges)
        }
        BinPolicy::FixedBinSize(w) => {
            let mut ng = 1u32;
            for ((l, &v), &m) in levels.iter_mut().zip(values).zip(mask) {
                if m {
                    let raw = ((v - min) / w).floor() as u32 + 1;
                    *l = raw;
                    ng = ng.max(raw);
                }
            }
            let edges = (0..=ng).map(|k| min + w * f64::from(k)).collect();
            (ng, edges)
        }
    };
    Ok(DiscretizedVolume {
        grid,
        levels,
        ng,
        edges,
    })
}
