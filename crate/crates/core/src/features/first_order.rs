use crate::error::{Error, Result};
use crate::volume::{check_pair, DiscretizedVolume, ScalarVolume, VoiMask};

use super::{entropy_bits, finite, Named};

/// Population moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub sum: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    /// Standardized third central moment; `None` when `std == 0`.
    pub skewness: Option<f64>,
    /// Standardized fourth central moment (not excess); `None` when `std == 0`.
    pub kurtosis: Option<f64>,
    pub energy: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Option<Moments> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let nf = n as f64;
        let mut sum = 0.0;
        let mut energy = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            sum += v;
            energy += v * v;
            min = min.min(v);
            max = max.max(v);
        }
        let mean = sum / nf;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= nf;
        m3 /= nf;
        m4 /= nf;
        let std = m2.sqrt();
        let (skewness, kurtosis) = if m2 > 0.0 {
            (finite(m3 / m2.powf(1.5)), finite(m4 / (m2 * m2)))
        } else {
            (None, None)
        };
        Some(Moments {
            n,
            sum,
            min,
            max,
            mean,
            std,
            skewness,
            kurtosis,
            energy,
        })
    }

    /// Coefficient of variation `std / mean`; `None` when the mean is zero.
    pub fn cov(&self) -> Option<f64> {
        if self.mean == 0.0 {
            None
        } else {
            finite(self.std / self.mean)
        }
    }
}

pub const FIRST_ORDER_NAMES: [&str; 11] = [
    "Volume", "Isum", "Imax", "Imin", "Imean", "Istd", "Icov", "Skewness", "Kurtosis", "Energy",
    "Entropy",
];

/// The 11 first-order features. Volume is reported in mL.
pub fn first_order(vol: &ScalarVolume, mask: &VoiMask, disc: &DiscretizedVolume) -> Result<Named> {
    check_pair(vol, mask)?;
    let vals: Vec<f64> = vol
        .values
        .iter()
        .zip(&mask.values)
        .filter_map(|(&v, &m)| m.then_some(v))
        .collect();
    let m = Moments::of(&vals).ok_or(Error::EmptyVoi)?;
    let volume_ml = m.n as f64 * vol.grid.voxel_volume() / 1000.0;
    let entropy = entropy_bits(&disc.histogram());
    let values = [
        Some(volume_ml),
        Some(m.sum),
        Some(m.max),
        Some(m.min),
        Some(m.mean),
        Some(m.std),
        m.cov(),
        m.skewness,
        m.kurtosis,
        Some(m.energy),
        Some(entropy),
    ];
    Ok(FIRST_ORDER_NAMES.iter().copied().zip(values).collect())
}
