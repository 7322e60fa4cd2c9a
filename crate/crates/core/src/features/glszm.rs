//! Gray-level size-zone matrix over 26-connected zones.

use crate::volume::DiscretizedVolume;

use super::{size_emphasis, DirectionSet13, Named};

/// Zone counts, `ng x zmax` row-major; column `z - 1` holds zones of `z`
/// voxels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glszm {
    pub ng: usize,
    pub zmax: usize,
    pub counts: Vec<u64>,
    pub voxels: usize,
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Zones are maximal 26-connected sets of equal gray level inside the VOI.
pub fn glszm(disc: &DiscretizedVolume) -> Glszm {
    let ng = disc.ng as usize;
    let g = disc.grid;
    let mut ds = DisjointSet::new(disc.levels.len());
    // The 13 forward directions reach every adjacent pair exactly once.
    let dirs = DirectionSet13::canonical();
    for (idx, &l) in disc.levels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let p = g.coords(idx);
        for o in dirs.iter() {
            if let Some(j) = g.offset_index(p, o) {
                if disc.levels[j] == l {
                    ds.union(idx, j);
                }
            }
        }
    }
    let mut zones: Vec<(usize, usize)> = Vec::new();
    let mut voxels = 0;
    for (idx, &l) in disc.levels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        voxels += 1;
        if ds.find(idx) == idx {
            zones.push((l as usize, ds.size[idx]));
        }
    }
    let zmax = zones.iter().map(|z| z.1).max().unwrap_or(0);
    let mut counts = vec![0u64; ng * zmax];
    for (l, s) in zones {
        counts[(l - 1) * zmax + (s - 1)] += 1;
    }
    Glszm {
        ng,
        zmax,
        counts,
        voxels,
    }
}

pub const GLSZM_NAMES: [&str; 11] = [
    "SZE", "LZE", "LGZE", "HGZE", "SZLGE", "LZLGE", "SZHGE", "LZHGE", "ZP", "GLNUz", "ZLNU",
];

pub fn glszm_features(m: &Glszm) -> Named {
    let as_f: Vec<f64> = m.counts.iter().map(|&c| c as f64).collect();
    let values = size_emphasis(&as_f, m.ng, m.zmax, m.voxels);
    GLSZM_NAMES.iter().copied().zip(values).collect()
}
