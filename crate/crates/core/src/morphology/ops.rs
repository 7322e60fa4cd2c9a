//! Flat grayscale erosion, dilation and opening with edge-clamp padding.
//!
//! Edge clamping makes every neighborhood the intersection of the element
//! with the grid, so erosion and dilation stay adjoint and opening is an
//! algebraic opening (anti-extensive, increasing, idempotent) on any grid.

use super::se::StructuringElement;
use crate::error::{Error, Result};
use crate::volume::{Grid, ScalarVolume};

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

impl Extremum {
    #[inline]
    fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            Extremum::Min => a.min(b),
            Extremum::Max => a.max(b),
        }
    }
}

/// Moving minimum over the element: `out(x) = min_{o in SE} in(clamp(x + o))`.
pub fn erode(vol: &ScalarVolume, se: &StructuringElement) -> Result<ScalarVolume> {
    if se.is_empty() {
        return Err(Error::EmptyStructuringElement);
    }
    Ok(match se.box_radius() {
        Some(r) => box_filter(vol, r, Extremum::Min),
        None => generic_filter(vol, se.offsets(), Extremum::Min),
    })
}

/// Moving maximum over the reflected element:
/// `out(x) = max_{o in SE} in(clamp(x - o))`.
pub fn dilate(vol: &ScalarVolume, se: &StructuringElement) -> Result<ScalarVolume> {
    if se.is_empty() {
        return Err(Error::EmptyStructuringElement);
    }
    Ok(match se.box_radius() {
        Some(r) => box_filter(vol, r, Extremum::Max),
        None => {
            let reflected: Vec<[i64; 3]> =
                se.offsets().iter().map(|o| [-o[0], -o[1], -o[2]]).collect();
            generic_filter(vol, &reflected, Extremum::Max)
        }
    })
}

/// `dilate(erode(vol, se), se)`.
pub fn opening(vol: &ScalarVolume, se: &StructuringElement) -> Result<ScalarVolume> {
    dilate(&erode(vol, se)?, se)
}

/// Erosion by the two-point element `{0, v}`: `out(x) = min(in(x), in(x + v))`,
/// or `in(x)` when `x + v` is outside the grid.
pub fn two_point_erosion(vol: &ScalarVolume, v: [i64; 3]) -> ScalarVolume {
    let g = vol.grid;
    let [nx, ny, nz] = g.dims;
    let mut out = vol.values.clone();
    // Valid x range along each axis for which x + v stays in the grid.
    let range = |n: usize, d: i64| -> (usize, usize) {
        let lo = (-d).max(0) as usize;
        let hi = (n as i64 - d.max(0)).max(0) as usize;
        (lo.min(n), hi.max(lo.min(n)))
    };
    let (x0, x1) = range(nx, v[0]);
    let (y0, y1) = range(ny, v[1]);
    let (z0, z1) = range(nz, v[2]);
    let shift = v[0] + v[1] * nx as i64 + v[2] * (nx * ny) as i64;
    for z in z0..z1 {
        for y in y0..y1 {
            let row = g.index(0, y, z);
            for x in x0..x1 {
                let i = row + x;
                let j = (i as i64 + shift) as usize;
                out[i] = vol.values[i].min(vol.values[j]);
            }
        }
    }
    ScalarVolume {
        grid: g,
        values: out,
        dtype: vol.dtype,
    }
}

fn generic_filter(vol: &ScalarVolume, offsets: &[[i64; 3]], op: Extremum) -> ScalarVolume {
    let g = vol.grid;
    let dims = g.dims.map(|d| d as i64);
    let mut out = Vec::with_capacity(g.len());
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let mut acc = match op {
                    Extremum::Min => f64::INFINITY,
                    Extremum::Max => f64::NEG_INFINITY,
                };
                for o in offsets {
                    let cx = (x + o[0]).clamp(0, dims[0] - 1) as usize;
                    let cy = (y + o[1]).clamp(0, dims[1] - 1) as usize;
                    let cz = (z + o[2]).clamp(0, dims[2] - 1) as usize;
                    acc = op.pick(acc, vol.values[g.index(cx, cy, cz)]);
                }
                out.push(acc);
            }
        }
    }
    ScalarVolume {
        grid: g,
        values: out,
        dtype: vol.dtype,
    }
}

/// Separable cube filter: three 1D passes, each van Herk / Gil-Werman.
fn box_filter(vol: &ScalarVolume, r: usize, op: Extremum) -> ScalarVolume {
    let mut values = vol.values.clone();
    if r > 0 {
        let mut scratch = LineScratch::default();
        for axis in 0..3 {
            filter_axis(&mut values, &vol.grid, axis, r, op, &mut scratch);
        }
    }
    ScalarVolume {
        grid: vol.grid,
        values,
        dtype: vol.dtype,
    }
}

#[derive(Default)]
struct LineScratch {
    line: Vec<f64>,
    padded: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    out: Vec<f64>,
}

fn filter_axis(
    values: &mut [f64],
    grid: &Grid,
    axis: usize,
    r: usize,
    op: Extremum,
    s: &mut LineScratch,
) {
    let [nx, ny, nz] = grid.dims;
    let n = grid.dims[axis];
    if n == 1 {
        return;
    }
    let stride = [1, nx, nx * ny][axis];
    let (outer_a, outer_b) = match axis {
        0 => (ny, nz),
        1 => (nx, nz),
        _ => (nx, ny),
    };
    for b in 0..outer_b {
        for a in 0..outer_a {
            let start = match axis {
                0 => grid.index(0, a, b),
                1 => grid.index(a, 0, b),
                _ => grid.index(a, b, 0),
            };
            s.line.clear();
            s.line.extend((0..n).map(|k| values[start + k * stride]));
            filter_line(s, r, op);
            for k in 0..n {
                values[start + k * stride] = s.out[k];
            }
        }
    }
}

/// 1D moving extremum over `[i - r, i + r]` clamped to the line, in three
/// comparisons per sample regardless of `r`.
fn filter_line(s: &mut LineScratch, r: usize, op: Extremum) {
    let n = s.line.len();
    let w = 2 * r + 1;
    let first = s.line[0];
    let last = s.line[n - 1];
    // Pad to n + 2r with edge values, then up to a multiple of w.
    let padded_len = (n + 2 * r).div_ceil(w) * w;
    s.padded.clear();
    s.padded.extend(std::iter::repeat_n(first, r));
    s.padded.extend_from_slice(&s.line);
    s.padded.resize(padded_len, last);

    s.prefix.clear();
    s.prefix.resize(padded_len, 0.0);
    s.suffix.clear();
    s.suffix.resize(padded_len, 0.0);
    for block in (0..padded_len).step_by(w) {
        s.prefix[block] = s.padded[block];
        for k in block + 1..block + w {
            s.prefix[k] = op.pick(s.prefix[k - 1], s.padded[k]);
        }
        let end = block + w - 1;
        s.suffix[end] = s.padded[end];
        for k in (block..end).rev() {
            s.suffix[k] = op.pick(s.suffix[k + 1], s.padded[k]);
        }
    }
    s.out.clear();
    // Output i covers padded[i ..= i + 2r].
    s.out
        .extend((0..n).map(|i| op.pick(s.suffix[i], s.prefix[i + w - 1])));
}
