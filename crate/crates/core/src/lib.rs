//! Radiomics feature extraction with classical texture matrices and
//! mathematical-morphology series, plus the survival statistics used to rank
//! features by prognostic value.
//!
//! The crate is organized by pipeline stage:
//!
//! - [`volume`]: RVF1 I/O, isotropic resampling, gray-level discretization
//! - [`features`]: the 49 classical features (first order, shape, GLCM,
//!   GLRLM, GLSZM, GLDM)
//! - [`morphology`]: granulometry and morphological covariance series
//!   (1,540 features)
//! - [`stats`]: Spearman screening, PCA, ROC cutoffs, Kaplan-Meier, log-rank,
//!   hazard ratios and p-value corrections
//! - [`phantom`]: seeded synthetic volumes and survival cohorts
//! - [`pipeline`]: the batch `extract` / `reduce` / `analyze` / `report`
//!   stages

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod morphology;
pub mod phantom;
pub mod pipeline;
pub mod stats;
pub mod volume;

pub use error::{Error, Result};
