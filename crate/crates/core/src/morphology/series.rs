use rayon::prelude::*;

use super::measures::{intensity_shift, measure_vector, MeasureVector, METRICS};
use super::ops::{opening, two_point_erosion};
use super::se::chebyshev_ball;
use crate::error::{Error, Result};
use crate::features::DirectionSet13;
use crate::volume::{check_pair, crop_to_voi, BinPolicy, ScalarVolume, VoiMask};

pub const GRANULOMETRY_RADII: usize = 10;
pub const COVARIANCE_DISTANCES: usize = 10;
pub const COVARIANCE_LEN: usize = 13 * COVARIANCE_DISTANCES;
pub const MM_FEATURE_COUNT: usize = METRICS.len() * (GRANULOMETRY_RADII + COVARIANCE_LEN);

/// Largest reach of any operator in the series, in voxels: an opening by a
/// radius-10 cube looks 20 voxels away.
pub const MM_MARGIN: usize = 2 * GRANULOMETRY_RADII;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Granulometry,
    Covariance,
}

impl SeriesKind {
    pub fn tag(self) -> &'static str {
        match self {
            SeriesKind::Granulometry => "gran",
            SeriesKind::Covariance => "cov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesIndex {
    /// Opening radius `1..=10`.
    Radius(usize),
    /// Direction index `0..13` in canonical order and distance `1..=10`.
    Vector { direction: usize, distance: usize },
}

impl SeriesIndex {
    /// Suffix used in feature names, e.g. `r03` or `u02.d10`.
    pub fn label(self) -> String {
        match self {
            SeriesIndex::Radius(r) => format!("r{r:02}"),
            SeriesIndex::Vector {
                direction,
                distance,
            } => format!("u{:02}.d{distance:02}", direction + 1),
        }
    }
}

/// Ordered measures of one morphological series.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphSeries {
    pub kind: SeriesKind,
    pub entries: Vec<(SeriesIndex, MeasureVector)>,
}

impl MorphSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn measures(&self) -> impl Iterator<Item = &MeasureVector> {
        self.entries.iter().map(|(_, m)| m)
    }
}

/// Openings by Chebyshev balls of radius 1..=10, each measured over the VOI.
pub fn granulometry_series(
    vol: &ScalarVolume,
    mask: &VoiMask,
    shift: f64,
    policy: BinPolicy,
) -> Result<MorphSeries> {
    check_pair(vol, mask)?;
    let entries = (1..=GRANULOMETRY_RADII)
        .into_par_iter()
        .map(|r| {
            let opened = opening(vol, &chebyshev_ball(r))?;
            Ok((SeriesIndex::Radius(r), measure_vector(&opened, mask, shift, policy)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MorphSeries {
        kind: SeriesKind::Granulometry,
        entries,
    })
}

/// Two-point erosions by `d * u` for every canonical direction `u` and
/// `d = 1..=10`, direction-major: entry `10 * u + (d - 1)`.
pub fn covariance_series(
    vol: &ScalarVolume,
    mask: &VoiMask,
    shift: f64,
    dirs: &DirectionSet13,
    policy: BinPolicy,
) -> Result<MorphSeries> {
    check_pair(vol, mask)?;
    let jobs: Vec<(usize, usize, [i64; 3])> = dirs
        .iter()
        .enumerate()
        .flat_map(|(u, o)| {
            (1..=COVARIANCE_DISTANCES).map(move |d| {
                let k = d as i64;
                (u, d, [o[0] * k, o[1] * k, o[2] * k])
            })
        })
        .collect();
    let entries = jobs
        .into_par_iter()
        .map(|(direction, distance, v)| {
            let eroded = two_point_erosion(vol, v);
            Ok((
                SeriesIndex::Vector {
                    direction,
                    distance,
                },
                measure_vector(&eroded, mask, shift, policy)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MorphSeries {
        kind: SeriesKind::Covariance,
        entries,
    })
}

/// Stable feature name, e.g. `MM.gran.volume.r01` or `MM.cov.std.u13.d10`.
pub fn mm_feature_name(kind: SeriesKind, metric: &str, index: SeriesIndex) -> String {
    format!("MM.{}.{metric}.{}", kind.tag(), index.label())
}

fn granulometry_indices() -> impl Iterator<Item = SeriesIndex> {
    (1..=GRANULOMETRY_RADII).map(SeriesIndex::Radius)
}

fn covariance_indices() -> impl Iterator<Item = SeriesIndex> {
    (0..13).flat_map(|direction| {
        (1..=COVARIANCE_DISTANCES).map(move |distance| SeriesIndex::Vector {
            direction,
            distance,
        })
    })
}

/// The 1,540 MM feature names: granulometry then covariance, metric-major
/// within each series.
pub fn mm_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(MM_FEATURE_COUNT);
    for m in METRICS {
        names.extend(granulometry_indices().map(|i| mm_feature_name(SeriesKind::Granulometry, m, i)));
    }
    for m in METRICS {
        names.extend(covariance_indices().map(|i| mm_feature_name(SeriesKind::Covariance, m, i)));
    }
    names
}

/// Flattens both series into named values, ordered as [`mm_feature_names`].
pub fn flatten_series(gran: &MorphSeries, cov: &MorphSeries) -> Vec<(String, Option<f64>)> {
    let mut out = Vec::with_capacity(MM_FEATURE_COUNT);
    for series in [gran, cov] {
        let arrays: Vec<[Option<f64>; 11]> = series.measures().map(|m| m.to_array()).collect();
        for (k, metric) in METRICS.iter().enumerate() {
            for ((idx, _), arr) in series.entries.iter().zip(&arrays) {
                out.push((mm_feature_name(series.kind, metric, *idx), arr[k]));
            }
        }
    }
    out
}

/// All 1,540 MM features for a resampled volume/mask pair.
///
/// The pair is first cropped to the VOI bounding box plus [`MM_MARGIN`]
/// voxels, which leaves every in-VOI result unchanged.
pub fn mm_feature_block(
    vol: &ScalarVolume,
    mask: &VoiMask,
    policy: BinPolicy,
) -> Result<Vec<(String, Option<f64>)>> {
    check_pair(vol, mask)?;
    if mask.is_empty_voi() {
        return Err(Error::EmptyVoi);
    }
    let (vol, mask) = crop_to_voi(vol, mask, [MM_MARGIN; 3])?;
    let shift = intensity_shift(&vol, &mask)?;
    let dirs = DirectionSet13::canonical();
    let gran = granulometry_series(&vol, &mask, shift, policy)?;
    let cov = covariance_series(&vol, &mask, shift, &dirs, policy)?;
    let out = flatten_series(&gran, &cov);
    debug_assert_eq!(out.len(), MM_FEATURE_COUNT);
    Ok(out)
}
