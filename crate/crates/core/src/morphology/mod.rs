//! Granulometry and morphological covariance: the 1,540 MM features.

mod measures;
mod ops;
mod se;
mod series;

pub use measures::{eta_moments, intensity_shift, measure_vector, MeasureVector, METRICS};
pub use ops::{dilate, erode, opening, two_point_erosion};
pub use se::{chebyshev_ball, two_point, StructuringElement};
pub use series::{
    covariance_series, flatten_series, granulometry_series, mm_feature_block, mm_feature_name,
    mm_feature_names, MorphSeries, SeriesIndex, SeriesKind, COVARIANCE_DISTANCES, COVARIANCE_LEN,
    GRANULOMETRY_RADII, MM_FEATURE_COUNT, MM_MARGIN,
};
