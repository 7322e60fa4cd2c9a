//! Redundancy analysis, PCA reduction and survival statistics.

mod analysis;
mod corrections;
mod km;
pub mod linalg;
mod logrank;
mod pca;
mod roc;
mod spearman;
mod table;

pub use analysis::{
    analyze_categorical, analyze_feature, build_reduced_table, rank_features, split_groups,
    two_year_label, AnalysisConfig, CategoricalResult, CategoryCount, GroupSummary,
    SurvivalAnalysisRow, SurvivalRecord, HORIZON_MONTHS,
};
pub use corrections::{altman_correct, altman_correct_with, bh_adjust, AltmanConstants, AltmanResult};
pub use km::{km_estimate, KmCurve, KmStep, KmSummary};
pub use logrank::{hazard_ratio, logrank_k, logrank_test, HazardRatio, LogRank};
pub use pca::{pca_fit_project, standardized_covariance, PcaModel};
pub use roc::{auc, percentile, roc_analysis, roc_analysis_within, Orientation, RocResult};
pub use spearman::{
    correlation_p_value, mid_ranks, redundancy_groups, spearman, spearman_matrix, SpearmanMatrix,
};
pub use table::{format_real, FeatureTable};

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// A follow-up time in months and whether it ended in death.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).map_or(1.0, |d| d.sf(x))
}
