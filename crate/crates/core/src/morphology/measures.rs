use crate::error::{Error, Result};
use crate::features::Moments;
use crate::volume::{check_pair, BinPolicy, ScalarVolume, VoiMask};

/// Metric names in output order.
pub const METRICS: [&str; 11] = [
    "volume", "eta300", "eta030", "eta003", "max", "std", "cov", "skewness", "kurtosis", "energy",
    "entropy",
];

/// The 11 measures taken after each morphological iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureVector {
    /// Sum of shifted intensities over the VOI.
    pub volume: f64,
    pub eta300: Option<f64>,
    pub eta030: Option<f64>,
    pub eta003: Option<f64>,
    pub max: f64,
    pub std: f64,
    pub cov: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub energy: f64,
    /// Histogram entropy in bits.
    pub entropy: f64,
}

impl MeasureVector {
    /// Values in [`METRICS`] order.
    pub fn to_array(&self) -> [Option<f64>; 11] {
        [
            Some(self.volume),
            self.eta300,
            self.eta030,
            self.eta003,
            Some(self.max),
            Some(self.std),
            self.cov,
            self.skewness,
            self.kurtosis,
            Some(self.energy),
            Some(self.entropy),
        ]
    }
}

/// Shift applied before measuring: minus the minimum in-VOI intensity of the
/// unprocessed volume.
pub fn intensity_shift(vol: &ScalarVolume, mask: &VoiMask) -> Result<f64> {
    check_pair(vol, mask)?;
    let min = vol
        .values
        .iter()
        .zip(&mask.values)
        .filter_map(|(&v, &m)| m.then_some(v))
        .fold(f64::INFINITY, f64::min);
    if min == f64::INFINITY {
        return Err(Error::EmptyVoi);
    }
    Ok(-min)
}

/// Shifted in-VOI weights `max(0, v + shift)` with their voxel coordinates.
///
/// Processed values can fall below the unprocessed VOI minimum when an
/// operator pulls in darker voxels from outside the VOI; those clamp to 0.
fn shifted(processed: &ScalarVolume, mask: &VoiMask, shift: f64) -> (Vec<f64>, Vec<[usize; 3]>) {
    let g = processed.grid;
    let mut w = Vec::new();
    let mut pos = Vec::new();
    for (i, (&v, &m)) in processed.values.iter().zip(&mask.values).enumerate() {
        if m {
            w.push((v + shift).max(0.0));
            pos.push(g.coords(i));
        }
    }
    (w, pos)
}

/// Normalized third-order central moments `(η300, η030, η003)` of the
/// intensity-weighted VOI, in voxel units. `None` when the total weight is 0.
pub fn eta_moments(
    processed: &ScalarVolume,
    mask: &VoiMask,
    shift: f64,
) -> Result<[Option<f64>; 3]> {
    check_pair(processed, mask)?;
    let (w, pos) = shifted(processed, mask, shift);
    if w.is_empty() {
        return Err(Error::EmptyVoi);
    }
    Ok(eta_from(&w, &pos))
}

fn eta_from(w: &[f64], pos: &[[usize; 3]]) -> [Option<f64>; 3] {
    let m000: f64 = w.iter().sum();
    if !(m000 > 0.0) {
        return [None; 3];
    }
    let mut centroid = [0.0; 3];
    for (&wi, p) in w.iter().zip(pos) {
        for a in 0..3 {
            centroid[a] += wi * p[a] as f64;
        }
    }
    for c in &mut centroid {
        *c /= m000;
    }
    let mut mu = [0.0; 3];
    for (&wi, p) in w.iter().zip(pos) {
        for a in 0..3 {
            let d = p[a] as f64 - centroid[a];
            mu[a] += wi * d * d * d;
        }
    }
    // order 3: exponent 1 + 3/3 = 2
    let norm = m000 * m000;
    mu.map(|m| {
        let e = m / norm;
        e.is_finite().then_some(e)
    })
}

/// Measures a processed volume over the original VOI.
pub fn measure_vector(
    processed: &ScalarVolume,
    mask: &VoiMask,
    shift: f64,
    policy: BinPolicy,
) -> Result<MeasureVector> {
    check_pair(processed, mask)?;
    let (w, pos) = shifted(processed, mask, shift);
    let m = Moments::of(&w).ok_or(Error::EmptyVoi)?;
    let [eta300, eta030, eta003] = eta_from(&w, &pos);
    let entropy = entropy_of(&w, policy)?;
    Ok(MeasureVector {
        volume: m.sum,
        eta300,
        eta030,
        eta003,
        max: m.max,
        std: m.std,
        cov: m.cov(),
        skewness: m.skewness,
        kurtosis: m.kurtosis,
        energy: m.energy,
        entropy,
    })
}

fn entropy_of(values: &[f64], policy: BinPolicy) -> Result<f64> {
    let n = values.len();
    let grid = crate::volume::Grid::unit([n, 1, 1]);
    let mask = vec![true; n];
    let d = crate::volume::discretize::discretize_values(grid, values, &mask, policy)?;
    Ok(crate::features::entropy_bits(&d.histogram()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Grid;

    fn full(dims: [usize; 3], values: Vec<f64>) -> (ScalarVolume, VoiMask) {
        let g = Grid::unit(dims);
        (ScalarVolume::new(g, values).unwrap(), VoiMask::filled(g, true))
    }

    #[test]
    fn constant_shifted_voi() {
        let (v, m) = full([2, 2, 2], vec![7.0; 8]);
        let mv = measure_vector(&v, &m, 0.0, BinPolicy::default()).unwrap();
        assert_eq!(mv.volume, 56.0);
        assert_eq!(mv.std, 0.0);
        assert_eq!(mv.entropy, 0.0);
        assert_eq!(mv.energy, 8.0 * 49.0);
        assert_eq!(mv.eta300, Some(0.0));
    }

    #[test]
    fn point_mass_has_zero_eta() {
        let g = Grid::unit([3, 3, 3]);
        let v = ScalarVolume::filled(g, 4.0);
        let mut m = VoiMask::filled(g, false);
        m.values[g.index(2, 0, 1)] = true;
        assert_eq!(eta_moments(&v, &m, 0.0).unwrap(), [Some(0.0); 3]);
    }

    #[test]
    fn symmetric_pair_and_line() {
        let (v, m) = full([2, 1, 1], vec![3.0, 3.0]);
        assert_eq!(eta_moments(&v, &m, 0.0).unwrap()[0], Some(0.0));
        let (v, m) = full([1, 1, 4], vec![1.0; 4]);
        // centroid 1.5, Σ (z - 1.5)^3 = 0
        assert_eq!(eta_moments(&v, &m, 0.0).unwrap()[2], Some(0.0));
    }

    #[test]
    fn asymmetric_line_eta() {
        // weights 1, 0, 0, 1, 2 along x: m000 = 4, centroid = (3 + 8)/4 = 2.75
        let (v, m) = full([5, 1, 1], vec![1.0, 0.0, 0.0, 1.0, 2.0]);
        let [e, ey, ez] = eta_moments(&v, &m, 0.0).unwrap();
        let c: f64 = 2.75;
        let mu = (0.0 - c).powi(3) + (3.0 - c).powi(3) + 2.0 * (4.0 - c).powi(3);
        assert!((e.unwrap() - mu / 16.0).abs() < 1e-15);
        assert_eq!(ey, Some(0.0));
        assert_eq!(ez, Some(0.0));
    }

    #[test]
    fn zero_weight_is_missing() {
        let (v, m) = full([2, 1, 1], vec![-5.0, -5.0]);
        assert_eq!(eta_moments(&v, &m, 5.0).unwrap(), [None; 3]);
        let mv = measure_vector(&v, &m, 5.0, BinPolicy::default()).unwrap();
        assert_eq!(mv.volume, 0.0);
        assert_eq!(mv.cov, None);
    }

    #[test]
    fn shift_from_voi_minimum() {
        let g = Grid::unit([3, 1, 1]);
        let v = ScalarVolume::new(g, vec![-1000.0, -40.0, 60.0]).unwrap();
        let m = VoiMask::new(g, vec![false, true, true]).unwrap();
        assert_eq!(intensity_shift(&v, &m).unwrap(), 40.0);
        assert!(intensity_shift(&v, &VoiMask::filled(g, false)).is_err());
    }
}
