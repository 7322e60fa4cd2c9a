//! Seeded synthetic tumors and survival cohorts with known ground truth.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64` (rand_chacha 0.9)
//! with normal and exponential variates from rand_distr 0.5, so a spec and
//! seed reproduce the same bytes on any platform.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::manifest::{CohortManifest, ManifestRow};
use crate::stats::SurvivalRecord;
use crate::volume::{write_mask, write_volume, DType, Grid, ScalarVolume, VoiMask};

/// Identifier recorded in every sidecar file.
pub const GENERATOR: &str = "ChaCha8Rng/seed_from_u64 (rand_chacha 0.9); rand_distr 0.5 Normal, Exp";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Voxels within Euclidean distance `r` of the grid center.
    Ball { r: f64 },
    /// Semi-axes along x, y, z.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// `s` voxels per side, centered.
    Cube { s: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Texture {
    Constant,
    /// Square wave along `axis` (0 = x): the first half of each period is
    /// bright.
    Stripes { period: usize, axis: usize },
    /// `density` blobs per VOI voxel (at least one) of the given radius.
    Blobs { density: f64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub seed: u64,
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub shape: Shape,
    pub texture: Texture,
    /// Tumor base intensity in HU.
    pub tumor_hu: f64,
    /// Half the bright/dark contrast of patterned textures.
    pub amplitude: f64,
    pub background_hu: f64,
    /// Gaussian noise standard deviation in HU, applied everywhere.
    pub noise_std: f64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            seed: 0,
            dims: [16, 16, 16],
            spacing: [1.0; 3],
            shape: Shape::Ball { r: 5.0 },
            texture: Texture::Constant,
            tumor_hu: 40.0,
            amplitude: 30.0,
            background_hu: -700.0,
            noise_std: 0.0,
        }
    }
}

fn center(dims: [usize; 3]) -> [f64; 3] {
    dims.map(|d| (d as f64 - 1.0) / 2.0)
}

fn shape_mask(grid: Grid, shape: Shape) -> Result<VoiMask> {
    let c = center(grid.dims);
    let inside = |p: [usize; 3]| -> bool {
        let d = [0, 1, 2].map(|a| p[a] as f64 - c[a]);
        match shape {
            Shape::Ball { r } => d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= r * r,
            Shape::Ellipsoid { a, b, c } => {
                (d[0] / a).powi(2) + (d[1] / b).powi(2) + (d[2] / c).powi(2) <= 1.0
            }
            Shape::Cube { s } => (0..3).all(|a| {
                let lo = (grid.dims[a].saturating_sub(s)) / 2;
                p[a] >= lo && p[a] < lo + s
            }),
        }
    };
    let bad = match shape {
        Shape::Ball { r } => !(r >= 0.0),
        Shape::Ellipsoid { a, b, c } => !(a > 0.0 && b > 0.0 && c > 0.0),
        Shape::Cube { s } => s == 0 || grid.dims.iter().any(|&d| s > d),
    };
    if bad {
        return Err(Error::InvalidParameter(format!("invalid shape {shape:?}")));
    }
    let values: Vec<bool> = (0..grid.len()).map(|i| inside(grid.coords(i))).collect();
    let mask = VoiMask::new(grid, values)?;
    let (lo, hi) = mask
        .bounding_box()
        .ok_or_else(|| Error::InvalidParameter(format!("shape {shape:?} covers no voxel")))?;
    if (0..3).any(|a| lo[a] < 1 || hi[a] + 1 > grid.dims[a]) {
        return Err(Error::InvalidParameter(format!(
            "shape {shape:?} does not fit in {:?} with a 1-voxel margin",
            grid.dims
        )));
    }
    Ok(mask)
}

/// Builds a tumor volume and its mask. Intensities are rounded to whole HU
/// and tagged `i16`, so writing and reloading is lossless.
pub fn make_phantom(spec: &PhantomSpec) -> Result<(ScalarVolume, VoiMask)> {
    let grid = Grid::new(spec.dims, spec.spacing, [0.0; 3])?;
    if !(spec.noise_std >= 0.0) {
        return Err(Error::InvalidParameter("noise_std must be >= 0".into()));
    }
    let mask = shape_mask(grid, spec.shape)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pattern: Box<dyn Fn([usize; 3]) -> f64> = match spec.texture {
        Texture::Constant => Box::new(|_| 0.0),
        Texture::Stripes { period, axis } => {
            if period < 2 || axis > 2 {
                return Err(Error::InvalidParameter(format!(
                    "stripes need period >= 2 and axis 0..=2, got {period}, {axis}"
                )));
            }
            let amp = spec.amplitude;
            Box::new(move |p| if (p[axis] % period) * 2 < period { amp } else { -amp })
        }
        Texture::Blobs { density, radius } => {
            if !(density >= 0.0) || !(radius > 0.0) {
                return Err(Error::InvalidParameter("blobs need density >= 0, radius > 0".into()));
            }
            let (lo, hi) = mask.bounding_box().expect("mask checked non-empty");
            let count = ((density * mask.count() as f64).round() as usize).max(1);
            let centers: Vec<[f64; 3]> = (0..count)
                .map(|_| [0, 1, 2].map(|a| rng.random_range(lo[a] as f64..hi[a] as f64)))
                .collect();
            let amp = spec.amplitude;
            Box::new(move |p| {
                let hit = centers.iter().any(|c| {
                    (0..3).map(|a| (p[a] as f64 - c[a]).powi(2)).sum::<f64>() <= radius * radius
                });
                if hit {
                    amp
                } else {
                    -amp
                }
            })
        }
    };
    let noise = Normal::new(0.0, spec.noise_std)
        .map_err(|e| Error::InvalidParameter(format!("noise: {e}")))?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let p = grid.coords(i);
        let base = if mask.values[i] {
            spec.tumor_hu + pattern(p)
        } else {
            spec.background_hu
        };
        let n = if spec.noise_std > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        values.push((base + n).round().clamp(i16::MIN as f64, i16::MAX as f64));
    }
    Ok((ScalarVolume::new(grid, values)?.with_dtype(DType::I16), mask))
}

/// The generated property that drives each patient's hazard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coupling {
    /// Ball radius drawn uniformly from `[min, max]` voxels.
    BallRadius { min: f64, max: f64 },
    /// Stripe period drawn uniformly from the integers `min..=max`, on a ball
    /// of the template radius.
    StripePeriod { min: usize, max: usize, axis: usize },
}

impl Coupling {
    /// Feature-name prefixes expected to carry the signal.
    pub fn driven_family(&self) -> Vec<String> {
        let v: &[&str] = match self {
            Coupling::BallRadius { .. } => &[
                "CR.FO.Volume",
                "CR.FO.Isum",
                "CR.FO.Energy",
                "MM.gran.volume.",
                "MM.cov.volume.",
                "MM.gran.energy.",
                "MM.cov.energy.",
            ],
            Coupling::StripePeriod { .. } => &["MM.cov.", "MM.gran.", "CR.GLCM.", "CR.GLRLM.", "CR.GLSZM.", "CR.GLDM."],
        };
        v.iter().map(|s| s.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CohortSpec {
    pub seed: u64,
    pub n: usize,
    pub coupling: Coupling,
    /// Events per month at the mean value of the driving property.
    pub baseline_hazard: f64,
    /// Hazard multiplier per cohort standard deviation of the driving
    /// property; 1 means no coupling.
    pub hazard_ratio: f64,
    /// Exponential censoring rate per month; 0 disables censoring.
    pub censoring_rate: f64,
    /// Template for every patient; shape, texture and seed are overridden.
    pub template: PhantomSpec,
    /// Ball radius when the coupling is not the radius.
    pub base_radius: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            seed: 0,
            n: 20,
            coupling: Coupling::BallRadius { min: 3.0, max: 6.0 },
            baseline_hazard: 0.03,
            hazard_ratio: 1.0,
            censoring_rate: 0.01,
            template: PhantomSpec {
                noise_std: 20.0,
                texture: Texture::Blobs {
                    density: 0.02,
                    radius: 1.5,
                },
                ..PhantomSpec::default()
            },
            base_radius: 5.0,
        }
    }
}

impl CohortSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.n < 2 {
            return bad("cohort needs n >= 2");
        }
        if !(self.baseline_hazard > 0.0) || !(self.hazard_ratio > 0.0) {
            return bad("hazards must be > 0");
        }
        if !(self.censoring_rate >= 0.0) {
            return bad("censoring rate must be >= 0");
        }
        match self.coupling {
            Coupling::BallRadius { min, max } if !(min > 0.0 && max >= min) => {
                bad("radius range must satisfy 0 < min <= max")
            }
            Coupling::StripePeriod { min, max, .. } if min < 2 || max < min => {
                bad("period range must satisfy 2 <= min <= max")
            }
            _ => Ok(()),
        }
    }
}

/// Ground truth for one generated patient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientTruth {
    pub patient_id: String,
    pub phantom_seed: u64,
    pub driving_value: f64,
    /// Events per month.
    pub hazard: f64,
    pub event_time: f64,
    /// `None` without censoring.
    pub censor_time: Option<f64>,
    pub os_months: f64,
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub generator: String,
    pub spec: CohortSpec,
    pub driven_family: Vec<String>,
    pub driving_mean: f64,
    pub driving_sd: f64,
    /// Mean of `hazard / (hazard + censoring_rate)` over patients.
    pub expected_event_fraction: f64,
    pub patients: Vec<PatientTruth>,
}

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const TRUTH_FILE: &str = "ground_truth.json";

const GENDERS: [&str; 2] = ["F", "M"];
const STAGES: [&str; 4] = ["I", "II", "IIIA", "IIIB"];
const HISTOLOGIES: [&str; 3] = ["adenocarcinoma", "large_cell", "squamous"];

/// Draws the cohort's survival data without writing any volume.
pub fn draw_cohort(spec: &CohortSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut drawn = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let value = match spec.coupling {
            Coupling::BallRadius { min, max } if max > min => rng.random_range(min..=max),
            Coupling::BallRadius { min, .. } => min,
            Coupling::StripePeriod { min, max, .. } => rng.random_range(min..=max) as f64,
        };
        let phantom_seed: u64 = rng.random();
        drawn.push((value, phantom_seed));
    }
    let n = spec.n as f64;
    let mean = drawn.iter().map(|d| d.0).sum::<f64>() / n;
    let sd = (drawn.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let unit = Exp::new(1.0).expect("rate 1 is valid");
    let mut patients = Vec::with_capacity(spec.n);
    for (i, &(value, phantom_seed)) in drawn.iter().enumerate() {
        let z = if sd > 0.0 { (value - mean) / sd } else { 0.0 };
        let hazard = spec.baseline_hazard * spec.hazard_ratio.powf(z);
        let event_time = unit.sample(&mut rng) / hazard;
        let censor_time = (spec.censoring_rate > 0.0).then(|| unit.sample(&mut rng) / spec.censoring_rate);
        let (os, event) = match censor_time {
            Some(c) if c < event_time => (c, false),
            _ => (event_time, true),
        };
        patients.push(PatientTruth {
            patient_id: format!("P{:04}", i + 1),
            phantom_seed,
            driving_value: value,
            hazard,
            event_time,
            censor_time,
            os_months: os,
            event,
        });
    }
    let expected_event_fraction = patients
        .iter()
        .map(|p| p.hazard / (p.hazard + spec.censoring_rate))
        .sum::<f64>()
        / n;
    Ok(GroundTruth {
        generator: GENERATOR.to_string(),
        spec: spec.clone(),
        driven_family: spec.coupling.driven_family(),
        driving_mean: mean,
        driving_sd: sd,
        expected_event_fraction,
        patients,
    })
}

/// Phantom spec of one patient.
pub fn patient_phantom(spec: &CohortSpec, p: &PatientTruth) -> PhantomSpec {
    let mut ps = spec.template;
    ps.seed = p.phantom_seed;
    match spec.coupling {
        Coupling::BallRadius { .. } => {
            ps.shape = Shape::Ball { r: p.driving_value };
        }
        Coupling::StripePeriod { axis, .. } => {
            ps.shape = Shape::Ball { r: spec.base_radius };
            ps.texture = Texture::Stripes {
                period: p.driving_value as usize,
                axis,
            };
        }
    }
    ps
}

/// Writes volumes, masks, `manifest.csv` and `ground_truth.json` into
/// `out_dir`. Manifest paths are relative to `out_dir`.
pub fn make_cohort(spec: &CohortSpec, out_dir: &Path) -> Result<CohortManifest> {
    let truth = draw_cohort(spec)?;
    for sub in ["volumes", "masks"] {
        let d = out_dir.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    // clinical covariates are independent of everything else
    let mut clin = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_c11a);
    let age_dist = Normal::new(66.0, 9.0).expect("valid normal");
    let mut rows = Vec::with_capacity(spec.n);
    for p in &truth.patients {
        let (vol, mask) = make_phantom(&patient_phantom(spec, p))?;
        let vol_rel = PathBuf::from("volumes").join(format!("{}.rvf", p.patient_id));
        let mask_rel = PathBuf::from("masks").join(format!("{}.rvf", p.patient_id));
        write_volume(out_dir.join(&vol_rel), &vol)?;
        write_mask(out_dir.join(&mask_rel), &mask)?;
        let mut record = SurvivalRecord::new(p.patient_id.clone(), p.os_months, p.event)?;
        let age: f64 = age_dist.sample(&mut clin);
        record.age = Some((age * 10.0).round() / 10.0);
        record.gender = Some(GENDERS[clin.random_range(0..GENDERS.len())].to_string());
        record.tnm = Some(STAGES[clin.random_range(0..STAGES.len())].to_string());
        record.histology = Some(HISTOLOGIES[clin.random_range(0..HISTOLOGIES.len())].to_string());
        rows.push(ManifestRow {
            record,
            volume_path: vol_rel,
            mask_path: mask_rel,
        });
    }
    let manifest = CohortManifest {
        rows,
        base_dir: out_dir.to_path_buf(),
    };
    manifest.save(&out_dir.join(MANIFEST_FILE))?;
    let truth_path = out_dir.join(TRUTH_FILE);
    let json = serde_json::to_string_pretty(&truth)?;
    std::fs::write(&truth_path, json + "\n").map_err(|e| Error::io(&truth_path, e))?;
    Ok(manifest)
}
