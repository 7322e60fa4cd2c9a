//! Batch stages: `extract` (1,589 features per patient), `reduce` (PCA down
//! to 159), `analyze` (survival report) and `report` (summary and plots).

pub mod analyze;
pub mod config;
pub mod extract;
pub mod manifest;
pub mod reduce;
pub mod report;

pub use analyze::{run_analyze, write_analyze, REPORT_FILE};
pub use config::{CorrelationOutput, RunConfig};
pub use extract::{extract_patient, run_extract, write_extract, ExtractOutput, FEATURES_FILE};
pub use manifest::{CohortManifest, ManifestRow, MANIFEST_HEADER};
pub use reduce::{run_reduce, write_reduce, ReduceOutput, REDUCED_FILE};
pub use report::{write_report, Report, PLOT_DIR, SUMMARY_FILE};
