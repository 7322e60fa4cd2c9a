use crate::error::{Error, Result};

/// Flat structuring element: a set of integer offsets `[dx, dy, dz]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<[i64; 3]>,
    /// Set when the element is exactly the cube `[-r, r]^3`.
    box_radius: Option<usize>,
}

impl StructuringElement {
    /// Deduplicates and sorts the offsets.
    pub fn new(mut offsets: Vec<[i64; 3]>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::EmptyStructuringElement);
        }
        offsets.sort_unstable();
        offsets.dedup();
        let box_radius = detect_box(&offsets);
        Ok(StructuringElement {
            offsets,
            box_radius,
        })
    }

    pub fn offsets(&self) -> &[[i64; 3]] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn box_radius(&self) -> Option<usize> {
        self.box_radius
    }

    /// Point reflection through the origin.
    pub fn reflect(&self) -> StructuringElement {
        let offsets = self.offsets.iter().map(|o| [-o[0], -o[1], -o[2]]).collect();
        StructuringElement::new(offsets).expect("reflection of a non-empty element")
    }
}

fn detect_box(offsets: &[[i64; 3]]) -> Option<usize> {
    let r = offsets.iter().flat_map(|o| o.iter().map(|c| c.unsigned_abs())).max()? as usize;
    let side = 2 * r + 1;
    if offsets.len() != side * side * side {
        return None;
    }
    // sorted, deduplicated, all within max-norm r and the right count: a full cube
    Some(r)
}

/// All offsets with max-norm `<= r`: a cube of side `2r + 1`. `r = 0` is the
/// identity element.
pub fn chebyshev_ball(r: usize) -> StructuringElement {
    let r = r as i64;
    let mut offsets = Vec::with_capacity(((2 * r + 1) as usize).pow(3));
    for dz in -r..=r {
        for dy in -r..=r {
            for dx in -r..=r {
                offsets.push([dx, dy, dz]);
            }
        }
    }
    StructuringElement::new(offsets).expect("non-empty ball")
}

/// The two-point element `{0, v}` used by morphological covariance.
pub fn two_point(v: [i64; 3]) -> StructuringElement {
    StructuringElement::new(vec![[0, 0, 0], v]).expect("non-empty")
}
