use super::{check_pair, Grid, ScalarVolume, VoiMask};
use crate::error::{Error, Result};

// Guards ceil() against representation noise, e.g. 3 * 0.1 / 0.1.
const DIM_EPS: f64 = 1e-9;

/// Resamples a volume (trilinear) and its mask (nearest neighbor) onto a grid
/// with `target` spacing and the same origin.
///
/// New dims are `ceil(old_dim * old_spacing / new_spacing)`. Samples that fall
/// outside the source grid clamp to the nearest edge voxel.
pub fn resample_isotropic(
    vol: &ScalarVolume,
    mask: &VoiMask,
    target: [f64; 3],
) -> Result<(ScalarVolume, VoiMask)> {
    check_pair(vol, mask)?;
    if target.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target spacing must be positive, got {target:?}"
        )));
    }
    let src = vol.grid;
    if src.spacing == target {
        return Ok((vol.clone(), mask.clone()));
    }

    let mut dims = [0usize; 3];
    for a in 0..3 {
        let extent = src.dims[a] as f64 * src.spacing[a] / target[a];
        dims[a] = ((extent - DIM_EPS).ceil() as usize).max(1);
    }
    let grid = Grid {
        dims,
        spacing: target,
        origin: src.origin,
    };

    // Per-axis source coordinate of every target index, precomputed.
    let axis_pos: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            (0..dims[a])
                .map(|i| {
                    let p = i as f64 * target[a] / src.spacing[a];
                    p.clamp(0.0, (src.dims[a] - 1) as f64)
                })
                .collect()
        })
        .collect();
    let axis_lin: Vec<Vec<(usize, usize, f64)>> = (0..3)
        .map(|a| {
            axis_pos[a]
                .iter()
                .map(|&p| {
                    let i0 = p.floor() as usize;
                    let i1 = (i0 + 1).min(src.dims[a] - 1);
                    (i0, i1, p - i0 as f64)
                })
                .collect()
        })
        .collect();
    let axis_nn: Vec<Vec<usize>> = (0..3)
        .map(|a| {
            axis_pos[a]
                .iter()
                .map(|&p| (p.round() as usize).min(src.dims[a] - 1))
                .collect()
        })
        .collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut mvals = Vec::with_capacity(grid.len());
    for z in 0..dims[2] {
        let (z0, z1, fz) = axis_lin[2][z];
        for y in 0..dims[1] {
            let (y0, y1, fy) = axis_lin[1][y];
            for x in 0..dims[0] {
                let (x0, x1, fx) = axis_lin[0][x];
                let v = |xx, yy, zz| vol.values[src.index(xx, yy, zz)];
                let c00 = lerp(v(x0, y0, z0), v(x1, y0, z0), fx);
                let c10 = lerp(v(x0, y1, z0), v(x1, y1, z0), fx);
                let c01 = lerp(v(x0, y0, z1), v(x1, y0, z1), fx);
                let c11 = lerp(v(x0, y1, z1), v(x1, y1, z1), fx);
                let c0 = lerp(c00, c10, fy);
                let c1 = lerp(c01, c11, fy);
                values.push(lerp(c0, c1, fz));
                mvals.push(mask.values[src.index(axis_nn[0][x], axis_nn[1][y], axis_nn[2][z])]);
            }
        }
    }
    Ok((
        ScalarVolume {
            grid,
            values,
            dtype: vol.dtype,
        },
        VoiMask {
            grid,
            values: mvals,
        },
    ))
}

// Clamped so rounding never leaves [min(a, b), max(a, b)].
#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 || a == b {
        return a;
    }
    let v = a + t * (b - a);
    v.clamp(a.min(b), a.max(b))
}
