//! Gray-level run-length matrix averaged over the 13 directions.

use crate::volume::DiscretizedVolume;

use super::{size_emphasis, DirectionSet13, Named};

/// Run counts for one direction, `ng x rmax` row-major; column `r - 1` holds
/// runs of length `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunCounts {
    pub ng: usize,
    pub rmax: usize,
    pub counts: Vec<u64>,
}

/// Mean run-length matrix over all directions, `ng x rmax` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Glrlm {
    pub ng: usize,
    pub rmax: usize,
    pub m: Vec<f64>,
    /// In-VOI voxel count.
    pub voxels: usize,
}

/// Maximal runs of equal gray level along `offset`. A run ends where the next
/// voxel leaves the grid, leaves the VOI, or changes level.
pub fn run_counts(disc: &DiscretizedVolume, offset: [i64; 3]) -> RunCounts {
    let ng = disc.ng as usize;
    let g = disc.grid;
    let back = [-offset[0], -offset[1], -offset[2]];
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut rmax = 0;
    for (idx, &l) in disc.levels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let p = g.coords(idx);
        let continues = g.offset_index(p, back).is_some_and(|j| disc.levels[j] == l);
        if continues {
            continue;
        }
        let mut len = 1usize;
        let mut cur = p;
        while let Some(j) = g.offset_index(cur, offset) {
            if disc.levels[j] != l {
                break;
            }
            len += 1;
            cur = g.coords(j);
        }
        rmax = rmax.max(len);
        runs.push((l as usize, len));
    }
    let mut counts = vec![0u64; ng * rmax];
    for (l, len) in runs {
        counts[(l - 1) * rmax + (len - 1)] += 1;
    }
    RunCounts { ng, rmax, counts }
}

pub fn glrlm_mean(disc: &DiscretizedVolume, dirs: &DirectionSet13, distance: i64) -> Glrlm {
    let per_dir: Vec<RunCounts> = dirs
        .iter()
        .map(|d| run_counts(disc, [d[0] * distance, d[1] * distance, d[2] * distance]))
        .collect();
    mean_of(disc.ng as usize, &per_dir, disc.voxel_count())
}

pub(crate) fn mean_of(ng: usize, per_dir: &[RunCounts], voxels: usize) -> Glrlm {
    let rmax = per_dir.iter().map(|r| r.rmax).max().unwrap_or(0);
    let mut sum = vec![0u64; ng * rmax];
    for rc in per_dir {
        for i in 0..ng {
            for r in 0..rc.rmax {
                sum[i * rmax + r] += rc.counts[i * rc.rmax + r];
            }
        }
    }
    let k = per_dir.len() as f64;
    Glrlm {
        ng,
        rmax,
        m: sum.iter().map(|&c| c as f64 / k).collect(),
        voxels,
    }
}

pub const GLRLM_NAMES: [&str; 11] = [
    "SRE", "LRE", "LGRE", "HGRE", "SRLGE", "LRLGE", "SRHGE", "LRHGE", "RP", "GLNUr", "RLNU",
];

pub fn glrlm_features(m: &Glrlm) -> Named {
    let values = size_emphasis(&m.m, m.ng, m.rmax, m.voxels);
    GLRLM_NAMES.iter().copied().zip(values).collect()
}
