use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{AltmanConstants, AnalysisConfig};
use crate::volume::BinPolicy;

/// Which Spearman matrices `reduce` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationOutput {
    /// The 49 classical features and all 1,589 features.
    #[default]
    Full,
    /// The 49 classical features only.
    CrOnly,
    None,
}

/// Settings shared by every stage, read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bin_policy: BinPolicy,
    /// Percentile bounds of the ROC cutoff search.
    pub cutoff_interval: [f64; 2],
    pub altman: AltmanConstants,
    pub alpha: f64,
    pub pca_components: usize,
    /// Resampling target in millimeters.
    pub target_spacing: [f64; 3],
    pub correlation_matrix: CorrelationOutput,
    pub redundancy_threshold: f64,
    /// Thread count; `None` uses every core. Never affects outputs, so it is
    /// left out of the copy embedded in reports.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bin_policy: BinPolicy::default(),
            cutoff_interval: [0.1, 0.9],
            altman: AltmanConstants::default(),
            alpha: 0.05,
            pca_components: 5,
            target_spacing: [1.0; 3],
            correlation_matrix: CorrelationOutput::default(),
            redundancy_threshold: 0.8,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.pca_components == 0 {
            return bad("pca_components must be >= 1".into());
        }
        let [lo, hi] = self.cutoff_interval;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return bad(format!("cutoff_interval must satisfy 0 < lo < hi < 1, got [{lo}, {hi}]"));
        }
        if self.target_spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return bad(format!("target_spacing must be positive, got {:?}", self.target_spacing));
        }
        match self.bin_policy {
            BinPolicy::FixedBinCount(0) => return bad("bin count must be >= 1".into()),
            BinPolicy::FixedBinSize(w) if !(w > 0.0) => {
                return bad(format!("bin size must be > 0, got {w}"))
            }
            _ => {}
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1".into());
        }
        if !(self.redundancy_threshold > 0.0 && self.redundancy_threshold <= 1.0) {
            return bad("redundancy_threshold must be in (0, 1]".into());
        }
        Ok(())
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            cutoff_interval: self.cutoff_interval,
            altman: self.altman,
            alpha: self.alpha,
        }
    }

    /// Runs `f` on a thread pool sized by `workers`.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            b = b.num_threads(w);
        }
        let pool = b
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}
