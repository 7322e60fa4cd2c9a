//! RVF1: a minimal raw volume format.
//!
//! ```text
//! RVF1
//! dims nx ny nz
//! spacing sx sy sz
//! origin ox oy oz
//! dtype i16|f32|u8
//! data
//! <little-endian payload, x-fastest, nx*ny*nz elements>
//! ```

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{Grid, ScalarVolume, VoiMask};
use crate::error::{Error, Result};

/// On-disk element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DType {
    I16,
    F32,
    U8,
}

impl DType {
    pub fn size(self) -> usize {
        match self {
            DType::I16 => 2,
            DType::F32 => 4,
            DType::U8 => 1,
        }
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DType::I16 => "i16",
            DType::F32 => "f32",
            DType::U8 => "u8",
        })
    }
}

impl FromStr for DType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i16" => Ok(DType::I16),
            "f32" => Ok(DType::F32),
            "u8" => Ok(DType::U8),
            other => Err(format!("unknown dtype {other:?}")),
        }
    }
}

#[derive(Debug)]
struct Parsed {
    grid: Grid,
    dtype: DType,
    values: Vec<f64>,
}

fn header_err(line: usize, message: impl Into<String>) -> Error {
    Error::Header {
        line,
        message: message.into(),
    }
}

fn parse_triple<T: FromStr>(line_no: usize, line: &str, key: &str) -> Result<[T; 3]> {
    let mut parts = line.split(' ');
    if parts.next() != Some(key) {
        return Err(header_err(line_no, format!("expected `{key} a b c`, got {line:?}")));
    }
    let items: Vec<&str> = parts.collect();
    if items.len() != 3 {
        return Err(header_err(line_no, format!("`{key}` needs exactly 3 values")));
    }
    let mut out = Vec::with_capacity(3);
    for it in items {
        out.push(
            it.parse::<T>()
                .map_err(|_| header_err(line_no, format!("cannot parse {it:?} in `{key}`")))?,
        );
    }
    let mut it = out.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

fn parse(bytes: &[u8]) -> Result<Parsed> {
    // Six newline-terminated header lines, then the payload.
    let mut lines = Vec::with_capacity(6);
    let mut pos = 0;
    for line_no in 1..=6 {
        let rest = &bytes[pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| header_err(line_no, "unexpected end of file in header"))?;
        let text = std::str::from_utf8(&rest[..end])
            .map_err(|_| header_err(line_no, "header is not valid ASCII"))?;
        lines.push(text);
        pos += end + 1;
    }
    if lines[0] != "RVF1" {
        return Err(header_err(1, format!("bad magic {:?}", lines[0])));
    }
    let dims: [usize; 3] = parse_triple(2, lines[1], "dims")?;
    let spacing: [f64; 3] = parse_triple(3, lines[2], "spacing")?;
    let origin: [f64; 3] = parse_triple(4, lines[3], "origin")?;
    let dtype = lines[4]
        .strip_prefix("dtype ")
        .ok_or_else(|| header_err(5, format!("expected `dtype ..`, got {:?}", lines[4])))?
        .parse::<DType>()
        .map_err(|m| header_err(5, m))?;
    if lines[5] != "data" {
        return Err(header_err(6, format!("expected `data`, got {:?}", lines[5])));
    }

    let grid = Grid {
        dims,
        spacing,
        origin,
    };
    if dims.contains(&0) {
        return Err(header_err(2, "dims must all be >= 1"));
    }
    if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(header_err(3, "spacing must be positive and finite"));
    }
    if origin.iter().any(|o| !o.is_finite()) {
        return Err(header_err(4, "origin must be finite"));
    }

    let n = dims[0]
        .checked_mul(dims[1])
        .and_then(|v| v.checked_mul(dims[2]))
        .ok_or_else(|| header_err(2, "dims overflow"))?;
    let payload = &bytes[pos..];
    let expected = n * dtype.size();
    if payload.len() != expected {
        return Err(Error::Payload {
            offset: pos,
            message: format!(
                "expected {expected} bytes ({n} x {dtype}), found {}",
                payload.len()
            ),
        });
    }
    let mut values = Vec::with_capacity(n);
    match dtype {
        DType::U8 => values.extend(payload.iter().map(|&b| f64::from(b))),
        DType::I16 => values.extend(
            payload
                .chunks_exact(2)
                .map(|c| f64::from(i16::from_le_bytes([c[0], c[1]]))),
        ),
        DType::F32 => {
            for (i, c) in payload.chunks_exact(4).enumerate() {
                let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                if !v.is_finite() {
                    return Err(Error::Payload {
                        offset: pos + 4 * i,
                        message: format!("non-finite value {v}"),
                    });
                }
                values.push(f64::from(v));
            }
        }
    }
    Ok(Parsed {
        grid,
        dtype,
        values,
    })
}

fn read(path: &Path) -> Result<Parsed> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse(&bytes)
}

pub fn load_volume(path: impl AsRef<Path>) -> Result<ScalarVolume> {
    let p = read(path.as_ref())?;
    Ok(ScalarVolume {
        grid: p.grid,
        values: p.values,
        dtype: p.dtype,
    })
}

/// Loads a binary mask. Any dtype is accepted as long as every value is 0 or 1.
pub fn load_mask(path: impl AsRef<Path>) -> Result<VoiMask> {
    let p = read(path.as_ref())?;
    let mut values = Vec::with_capacity(p.values.len());
    for (index, &v) in p.values.iter().enumerate() {
        if v == 0.0 {
            values.push(false);
        } else if v == 1.0 {
            values.push(true);
        } else {
            return Err(Error::MaskDomain { index, value: v });
        }
    }
    Ok(VoiMask {
        grid: p.grid,
        values,
    })
}

fn header(grid: &Grid, dtype: DType) -> String {
    let [nx, ny, nz] = grid.dims;
    let [sx, sy, sz] = grid.spacing;
    let [ox, oy, oz] = grid.origin;
    format!("RVF1\ndims {nx} {ny} {nz}\nspacing {sx} {sy} {sz}\norigin {ox} {oy} {oz}\ndtype {dtype}\ndata\n")
}

/// Encodes a volume using its own `dtype`. Integer dtypes round to nearest
/// and saturate.
pub fn encode_volume(vol: &ScalarVolume) -> Vec<u8> {
    let mut out = header(&vol.grid, vol.dtype).into_bytes();
    out.reserve(vol.values.len() * vol.dtype.size());
    match vol.dtype {
        DType::U8 => out.extend(vol.values.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8)),
        DType::I16 => {
            for &v in &vol.values {
                let q = v.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                out.extend_from_slice(&q.to_le_bytes());
            }
        }
        DType::F32 => {
            for &v in &vol.values {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
    }
    out
}

pub fn write_volume(path: impl AsRef<Path>, vol: &ScalarVolume) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_volume(vol)).map_err(|e| Error::io(path, e))
}

pub fn write_mask(path: impl AsRef<Path>, mask: &VoiMask) -> Result<()> {
    write_volume(path, &mask.to_volume())
}
