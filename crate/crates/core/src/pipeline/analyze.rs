use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use super::config::RunConfig;
use super::manifest::CohortManifest;
use super::report::{
    CategoricalEntry, ClinicalSection, RankedEntry, Report, ReportMetadata, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::stats::{
    analyze_categorical, analyze_feature, km_estimate, rank_features, split_groups, FeatureTable,
    KmStep, SurvivalRecord, HORIZON_MONTHS,
};

pub const REPORT_FILE: &str = "report.json";
pub const KM_DIR: &str = "km";
pub const AGE_FEATURE: &str = "clinical.age";

/// File-system safe version of a feature name.
pub fn file_stem(feature: &str) -> String {
    feature
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Survival analysis of every reduced feature plus age, categorical tests
/// of gender, TNM stage and histology, and the corrected ranking.
pub fn run_analyze(
    reduced: &FeatureTable,
    manifest: &CohortManifest,
    cfg: &RunConfig,
) -> Result<Report> {
    cfg.validate()?;
    let by_id: HashMap<&str, &SurvivalRecord> = manifest
        .rows
        .iter()
        .map(|r| (r.record.patient_id.as_str(), &r.record))
        .collect();
    let unknown: Vec<&String> = reduced
        .patients()
        .iter()
        .filter(|p| !by_id.contains_key(p.as_str()))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Analysis(format!(
            "{} patient(s) in the feature table are not in the manifest, e.g. {}",
            unknown.len(),
            unknown[0]
        )));
    }
    let skipped = manifest.rows.len() - reduced.n_patients();
    if skipped > 0 {
        log::warn!("{skipped} manifest patient(s) have no features and are left out");
    }
    let records: Vec<SurvivalRecord> = reduced
        .patients()
        .iter()
        .map(|p| by_id[p.as_str()].clone())
        .collect();
    let n_events = records.iter().filter(|r| r.event).count();
    if n_events == 0 {
        return Err(Error::Analysis(format!(
            "no deaths among the {} analyzed patients; survival analysis is undefined",
            records.len()
        )));
    }
    let acfg = cfg.analysis();

    let (mut rows, age_row, categorical) = cfg.install(|| {
        let rows: Vec<_> = (0..reduced.n_features())
            .into_par_iter()
            .map(|j| {
                let row = analyze_feature(&reduced.features()[j], &reduced.column(j), &records, &acfg);
                if row.n_missing > 0 {
                    log::info!("{}: {} patient(s) without a value", row.feature, row.n_missing);
                }
                row
            })
            .collect();
        let ages: Vec<Option<f64>> = records.iter().map(|r| r.age).collect();
        let age_row = analyze_feature(AGE_FEATURE, &ages, &records, &acfg);
        let categorical: Vec<CategoricalEntry> = [
            ("gender", records.iter().map(|r| r.gender.clone()).collect::<Vec<_>>()),
            ("tnm", records.iter().map(|r| r.tnm.clone()).collect()),
            ("histology", records.iter().map(|r| r.histology.clone()).collect()),
        ]
        .into_iter()
        .map(|(name, labels)| match analyze_categorical(&labels, &records) {
            Ok(result) => CategoricalEntry {
                covariate: name.to_string(),
                result: Some(result),
                note: None,
            },
            Err(e) => CategoricalEntry {
                covariate: name.to_string(),
                result: None,
                note: Some(e.to_string()),
            },
        })
        .collect();
        (rows, age_row, categorical)
    })?;

    // age shares the correction family with the image features
    rows.push(age_row);
    let ranked_rows = rank_features(&mut rows, cfg.alpha);
    let age_row = rows.pop().expect("age row pushed above");

    let mut ranked = Vec::with_capacity(ranked_rows.len());
    for (i, row) in ranked_rows.into_iter().enumerate() {
        let values: Vec<Option<f64>> = if row.feature == AGE_FEATURE {
            records.iter().map(|r| r.age).collect()
        } else {
            reduced
                .column_by_name(&row.feature)
                .expect("ranked feature comes from the table")
        };
        let (high, low) = split_groups(
            &values,
            &records,
            row.orientation.expect("ranked rows are evaluable"),
            row.cutoff.expect("ranked rows are evaluable"),
        );
        let curve = |g: &[_]| -> Result<Vec<KmStep>> { Ok(km_estimate(g)?.curve.steps) };
        ranked.push(RankedEntry {
            rank: i + 1,
            km_high: curve(&high)?,
            km_low: curve(&low)?,
            row,
        });
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        metadata: ReportMetadata {
            tool: "morphorad".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            n_patients: records.len(),
            n_events,
            n_features: rows.len(),
            horizon_months: HORIZON_MONTHS,
            cutoff_policy: "youden_j_on_two_year_label".to_string(),
            hr_estimator: "mantel_haenszel_observed_over_expected".to_string(),
            mean_os: "restricted_mean_to_last_observed_time".to_string(),
            correction_order: vec!["altman".to_string(), "benjamini_hochberg".to_string()],
        },
        ranked,
        features: rows,
        clinical: ClinicalSection {
            age: age_row,
            categorical,
        },
    })
}

/// Writes `report.json` and `km/<feature>__high.csv` / `__low.csv` for every
/// ranked feature.
pub fn write_analyze(out: &Path, report: &Report) -> Result<()> {
    let km = out.join(KM_DIR);
    std::fs::create_dir_all(&km).map_err(|e| Error::io(&km, e))?;
    report.save(&out.join(REPORT_FILE))?;
    for e in &report.ranked {
        for (tag, steps) in [("high", &e.km_high), ("low", &e.km_low)] {
            let p = km.join(format!("{}__{tag}.csv", file_stem(&e.row.feature)));
            let f = std::fs::File::create(&p).map_err(|err| Error::io(&p, err))?;
            write_km_csv(steps, std::io::BufWriter::new(f))?;
        }
    }
    Ok(())
}

pub fn write_km_csv<W: std::io::Write>(steps: &[KmStep], writer: W) -> Result<()> {
    use crate::stats::format_real;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["time", "survival", "at_risk", "deaths", "censored"])?;
    for s in steps {
        w.write_record([
            format_real(s.time),
            format_real(s.survival),
            s.at_risk.to_string(),
            s.deaths.to_string(),
            s.censored.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<km>", e))?;
    Ok(())
}
