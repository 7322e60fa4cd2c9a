use std::io::Write;
use std::path::Path;

use super::config::{CorrelationOutput, RunConfig};
use super::extract::extracted_feature_names;
use crate::error::{Error, Result};
use crate::features::{classical_feature_names, CLASSICAL_FEATURE_COUNT};
use crate::morphology::{SeriesKind, METRICS};
use crate::stats::{
    build_reduced_table, format_real, pca_fit_project, redundancy_groups, spearman_matrix,
    FeatureTable, PcaModel, SpearmanMatrix,
};

pub const REDUCED_FILE: &str = "reduced.csv";
pub const EXPLAINED_FILE: &str = "explained_variance.csv";
pub const PCA_DIR: &str = "pca";
pub const SPEARMAN_CR_FILE: &str = "spearman_cr.csv";
pub const SPEARMAN_ALL_FILE: &str = "spearman_all.csv";
pub const GROUPS_FILE: &str = "redundancy_groups.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ReduceOutput {
    pub reduced: FeatureTable,
    /// One model per metric and series kind: granulometry metrics first.
    pub models: Vec<PcaModel>,
    pub spearman_cr: Option<SpearmanMatrix>,
    pub spearman_all: Option<SpearmanMatrix>,
    /// Redundancy groups over the widest matrix computed.
    pub groups: Vec<Vec<String>>,
}

/// Column-name prefix of one metric's series, e.g. `MM.cov.std`.
pub fn metric_prefix(kind: SeriesKind, metric: &str) -> String {
    format!("MM.{}.{metric}", kind.tag())
}

fn series_columns(features: &[String], prefix: &str) -> Vec<String> {
    let p = format!("{prefix}.");
    features.iter().filter(|f| f.starts_with(&p)).cloned().collect()
}

fn zero_variance(col: &[Option<f64>]) -> bool {
    let mut it = col.iter().flatten();
    match it.next() {
        None => true,
        Some(first) => it.all(|v| v == first),
    }
}

/// PCA per metric and series, Spearman screening, and the reduced table of
/// `49 + 22 k` columns.
pub fn run_reduce(table: &FeatureTable, cfg: &RunConfig) -> Result<ReduceOutput> {
    cfg.validate()?;
    let expected = extracted_feature_names();
    if table.features() != expected.as_slice() {
        return Err(Error::Table(format!(
            "feature table must have the {} extracted columns in canonical order, got {}",
            expected.len(),
            table.n_features()
        )));
    }
    let k = cfg.pca_components;
    if table.n_patients() < k + 1 {
        return Err(Error::InsufficientData(format!(
            "PCA with {k} components needs at least {} patients, got {}",
            k + 1,
            table.n_patients()
        )));
    }
    let mm_cols: Vec<usize> = (CLASSICAL_FEATURE_COUNT..table.n_features()).collect();
    let constant = mm_cols.iter().filter(|&&j| zero_variance(&table.column(j))).count();
    if constant == mm_cols.len() {
        return Err(Error::Analysis(format!(
            "all {constant} morphological features have zero variance across {} patients; \
             nothing to reduce",
            table.n_patients()
        )));
    }
    if constant > 0 {
        log::warn!("{constant} of {} morphological features have zero variance", mm_cols.len());
    }

    cfg.install(|| {
        let cr = table.select(&classical_feature_names())?;
        let mut models = Vec::new();
        let mut blocks = Vec::new();
        for kind in [SeriesKind::Granulometry, SeriesKind::Covariance] {
            for metric in METRICS {
                let prefix = metric_prefix(kind, metric);
                let block = table.select(&series_columns(table.features(), &prefix))?;
                let (model, projected) = pca_fit_project(&block, &prefix, k)?;
                models.push(model);
                blocks.push(projected);
            }
        }
        let reduced = build_reduced_table(&cr, &blocks)?;
        assert_eq!(reduced.n_features(), CLASSICAL_FEATURE_COUNT + 2 * METRICS.len() * k);
        if k == 5 {
            assert_eq!(reduced.n_features(), 159, "49 + 110 reduced features");
        }

        let (spearman_cr, spearman_all) = match cfg.correlation_matrix {
            CorrelationOutput::None => (None, None),
            CorrelationOutput::CrOnly => (Some(spearman_matrix(&cr)), None),
            CorrelationOutput::Full => (Some(spearman_matrix(&cr)), Some(spearman_matrix(table))),
        };
        let groups = spearman_all
            .as_ref()
            .or(spearman_cr.as_ref())
            .map(|m| {
                redundancy_groups(m, cfg.redundancy_threshold, cfg.alpha)
                    .into_iter()
                    .map(|g| g.into_iter().map(|i| m.names[i].clone()).collect())
                    .collect()
            })
            .unwrap_or_default();
        Ok(ReduceOutput {
            reduced,
            models,
            spearman_cr,
            spearman_all,
            groups,
        })
    })?
}

fn opt(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

/// `|rho|` as a square CSV with feature names on both axes.
pub fn write_abs_rho<W: Write>(m: &SpearmanMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["feature".to_string()];
    header.extend(m.names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..m.len() {
        let mut rec = vec![m.names[i].clone()];
        rec.extend((0..m.len()).map(|j| opt(m.rho_at(i, j).map(f64::abs))));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<spearman>", e))?;
    Ok(())
}

/// One row per input column: mean, scale and the loading on each component.
pub fn write_loadings<W: Write>(model: &PcaModel, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["input".to_string(), "mean".into(), "scale".into()];
    header.extend((1..=model.k()).map(|c| format!("PCA{c}")));
    w.write_record(&header)?;
    for (i, name) in model.inputs.iter().enumerate() {
        let mut rec = vec![name.clone(), format_real(model.mean[i]), format_real(model.scale[i])];
        rec.extend(model.loadings[i].iter().map(|&l| format_real(l)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<loadings>", e))?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

/// Writes the reduced table, PCA loadings, explained variances, Spearman
/// matrices and redundancy groups into `out`.
pub fn write_reduce(out: &Path, r: &ReduceOutput) -> Result<()> {
    let pca_dir = out.join(PCA_DIR);
    std::fs::create_dir_all(&pca_dir).map_err(|e| Error::io(&pca_dir, e))?;
    r.reduced.write_csv_file(out.join(REDUCED_FILE))?;
    for m in &r.models {
        write_loadings(m, create(&pca_dir.join(format!("{}.csv", m.metric)))?)?;
    }
    let mut w = csv::Writer::from_writer(create(&out.join(EXPLAINED_FILE))?);
    w.write_record(["metric", "component", "variance", "ratio"])?;
    for m in &r.models {
        for (c, (v, ratio)) in m.explained.iter().zip(m.explained_ratio()).enumerate() {
            w.write_record([
                m.metric.clone(),
                format!("PCA{}", c + 1),
                format_real(*v),
                opt(ratio),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(out.join(EXPLAINED_FILE), e))?;
    if let Some(m) = &r.spearman_cr {
        write_abs_rho(m, create(&out.join(SPEARMAN_CR_FILE))?)?;
    }
    if let Some(m) = &r.spearman_all {
        write_abs_rho(m, create(&out.join(SPEARMAN_ALL_FILE))?)?;
    }
    let mut w = csv::Writer::from_writer(create(&out.join(GROUPS_FILE))?);
    w.write_record(["group", "feature"])?;
    for (g, members) in r.groups.iter().enumerate() {
        for f in members {
            w.write_record([(g + 1).to_string(), f.clone()])?;
        }
    }
    w.flush().map_err(|e| Error::io(out.join(GROUPS_FILE), e))?;
    Ok(())
}
