use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::volume::VoiMask;

/// Voxel-face surface area of the VOI in mm²: every face shared by an in-mask
/// voxel and an out-of-mask (or out-of-grid) voxel counts once.
pub fn surface_area(mask: &VoiMask) -> f64 {
    let g = mask.grid;
    let [sx, sy, sz] = g.spacing;
    let face = [sy * sz, sx * sz, sx * sy];
    let mut exposed = [0u64; 3];
    for (i, &m) in mask.values.iter().enumerate() {
        if !m {
            continue;
        }
        let p = g.coords(i);
        for axis in 0..3 {
            for step in [-1i64, 1] {
                let mut off = [0i64; 3];
                off[axis] = step;
                let inside = g.offset_index(p, off).is_some_and(|j| mask.values[j]);
                if !inside {
                    exposed[axis] += 1;
                }
            }
        }
    }
    (0..3).map(|a| exposed[a] as f64 * face[a]).sum()
}

/// `π^(1/3) (6V)^(2/3) / A`, in (0, 1] for voxelized shapes.
pub fn sphericity(mask: &VoiMask) -> Result<f64> {
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyVoi);
    }
    let volume = n as f64 * mask.grid.voxel_volume();
    let area = surface_area(mask);
    Ok(PI.cbrt() * (6.0 * volume).powf(2.0 / 3.0) / area)
}
