//! Voxel grids, the RVF1 file format, isotropic resampling and gray-level
//! discretization.
//!
//! All grids are stored x-fastest: the linear index of voxel `(x, y, z)` is
//! `x + nx * (y + ny * z)`.

pub(crate) mod discretize;
mod resample;
mod rvf;

pub use discretize::{discretize, BinPolicy, DiscretizedVolume};
pub use resample::resample_isotropic;
pub use rvf::{encode_volume, load_mask, load_volume, write_mask, write_volume, DType};

use crate::error::{Error, Result};

/// Geometry shared by a volume and its mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dims: [usize; 3],
    /// Voxel size in millimeters.
    pub spacing: [f64; 3],
    /// Physical position of the center of voxel (0, 0, 0), in millimeters.
    pub origin: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        let grid = Grid {
            dims,
            spacing,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Unit-spacing grid at the origin.
    pub fn unit(dims: [usize; 3]) -> Self {
        Grid {
            dims,
            spacing: [1.0; 3],
            origin: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::Grid(format!("dims must be >= 1, got {:?}", self.dims)));
        }
        if self.spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Grid(format!(
                "spacing must be positive and finite, got {:?}",
                self.spacing
            )));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Grid(format!("origin must be finite, got {:?}", self.origin)));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Index of `p + offset` when it lies inside the grid.
    #[inline]
    pub fn offset_index(&self, p: [usize; 3], offset: [i64; 3]) -> Option<usize> {
        let mut q = [0usize; 3];
        for a in 0..3 {
            let c = p[a] as i64 + offset[a];
            if c < 0 || c >= self.dims[a] as i64 {
                return None;
            }
            q[a] = c as usize;
        }
        Some(self.index(q[0], q[1], q[2]))
    }

    /// Volume of a single voxel in mm³.
    pub fn voxel_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// Sub-grid `[lo, hi)` with its origin moved so that physical positions
    /// are unchanged.
    pub fn crop(&self, lo: [usize; 3], hi: [usize; 3]) -> Grid {
        let mut origin = self.origin;
        let mut dims = [0; 3];
        for a in 0..3 {
            origin[a] += lo[a] as f64 * self.spacing[a];
            dims[a] = hi[a] - lo[a];
        }
        Grid {
            dims,
            spacing: self.spacing,
            origin,
        }
    }
}

/// A 3D intensity grid (Hounsfield units for CT).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarVolume {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Storage type used when the volume is written back to disk.
    pub dtype: DType,
}

impl ScalarVolume {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite value at voxel {i}")));
        }
        Ok(ScalarVolume {
            grid,
            values,
            dtype: DType::F32,
        })
    }

    pub fn filled(grid: Grid, value: f64) -> Self {
        ScalarVolume {
            values: vec![value; grid.len()],
            grid,
            dtype: DType::F32,
        }
    }

    pub fn with_dtype(mut self, dtype: DType) -> Self {
        self.dtype = dtype;
        self
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.grid.dims
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.grid.index(x, y, z)]
    }

    /// Same voxels on a cropped sub-grid `[lo, hi)`.
    pub fn crop(&self, lo: [usize; 3], hi: [usize; 3]) -> ScalarVolume {
        let grid = self.grid.crop(lo, hi);
        let mut values = Vec::with_capacity(grid.len());
        for z in lo[2]..hi[2] {
            for y in lo[1]..hi[1] {
                let start = self.grid.index(lo[0], y, z);
                values.extend_from_slice(&self.values[start..start + grid.dims[0]]);
            }
        }
        ScalarVolume {
            grid,
            values,
            dtype: self.dtype,
        }
    }
}

/// Binary region of interest on the same grid as its [`ScalarVolume`].
#[derive(Debug, Clone, PartialEq)]
pub struct VoiMask {
    pub grid: Grid,
    pub values: Vec<bool>,
}

impl VoiMask {
    pub fn new(grid: Grid, values: Vec<bool>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} mask values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(VoiMask { grid, values })
    }

    pub fn filled(grid: Grid, value: bool) -> Self {
        VoiMask {
            values: vec![value; grid.len()],
            grid,
        }
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }

    pub fn is_empty_voi(&self) -> bool {
        !self.values.iter().any(|&v| v)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> bool {
        self.values[self.grid.index(x, y, z)]
    }

    /// Linear indices of all set voxels, in grid order.
    pub fn indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| v.then_some(i))
            .collect()
    }

    /// Inclusive-exclusive bounding box `[lo, hi)` of the set voxels.
    pub fn bounding_box(&self) -> Option<([usize; 3], [usize; 3])> {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let mut any = false;
        for (i, &v) in self.values.iter().enumerate() {
            if v {
                any = true;
                let c = self.grid.coords(i);
                for a in 0..3 {
                    lo[a] = lo[a].min(c[a]);
                    hi[a] = hi[a].max(c[a] + 1);
                }
            }
        }
        any.then_some((lo, hi))
    }

    pub fn crop(&self, lo: [usize; 3], hi: [usize; 3]) -> VoiMask {
        let grid = self.grid.crop(lo, hi);
        let mut values = Vec::with_capacity(grid.len());
        for z in lo[2]..hi[2] {
            for y in lo[1]..hi[1] {
                let start = self.grid.index(lo[0], y, z);
                values.extend_from_slice(&self.values[start..start + grid.dims[0]]);
            }
        }
        VoiMask { grid, values }
    }

    pub fn to_volume(&self) -> ScalarVolume {
        ScalarVolume {
            grid: self.grid,
            values: self.values.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect(),
            dtype: DType::U8,
        }
    }
}

/// Checks that a volume and mask share dims, spacing and origin exactly.
pub fn check_pair(vol: &ScalarVolume, mask: &VoiMask) -> Result<()> {
    if vol.grid != mask.grid {
        return Err(Error::GridMismatch(format!(
            "volume {:?} vs mask {:?}",
            vol.grid, mask.grid
        )));
    }
    Ok(())
}

/// Crops a pair to the mask bounding box grown by `margin` voxels per side,
/// clamped to the grid.
pub fn crop_to_voi(
    vol: &ScalarVolume,
    mask: &VoiMask,
    margin: [usize; 3],
) -> Result<(ScalarVolume, VoiMask)> {
    check_pair(vol, mask)?;
    let (lo, hi) = mask.bounding_box().ok_or(Error::EmptyVoi)?;
    let mut clo = [0; 3];
    let mut chi = [0; 3];
    for a in 0..3 {
        clo[a] = lo[a].saturating_sub(margin[a]);
        chi[a] = (hi[a] + margin[a]).min(vol.grid.dims[a]);
    }
    Ok((vol.crop(clo, chi), mask.crop(clo, chi)))
}
