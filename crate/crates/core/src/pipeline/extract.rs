use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::config::RunConfig;
use super::manifest::CohortManifest;
use crate::error::{Error, Result};
use crate::features::{classical_feature_names, classical_features, CLASSICAL_FEATURE_COUNT};
use crate::morphology::{mm_feature_block, mm_feature_names, MM_FEATURE_COUNT, MM_MARGIN};
use crate::stats::FeatureTable;
use crate::volume::{
    check_pair, crop_to_voi, discretize, load_mask, load_volume, resample_isotropic, ScalarVolume,
    VoiMask,
};

/// Total extracted features per patient.
pub const EXTRACTED_FEATURE_COUNT: usize = CLASSICAL_FEATURE_COUNT + MM_FEATURE_COUNT;

pub const FEATURES_FILE: &str = "features.csv";
pub const STATUS_FILE: &str = "extract_status.csv";

/// All 1,589 feature names in column order.
pub fn extracted_feature_names() -> Vec<String> {
    let mut names = classical_feature_names();
    names.extend(mm_feature_names());
    names
}

/// Resamples, discretizes and extracts every feature of one patient.
///
/// The pair is cropped to the VOI before resampling, keeping enough context
/// for the largest morphological operator plus interpolation.
pub fn extract_patient(
    vol: &ScalarVolume,
    mask: &VoiMask,
    cfg: &RunConfig,
) -> Result<Vec<(String, Option<f64>)>> {
    check_pair(vol, mask)?;
    let margin: [usize; 3] = std::array::from_fn(|a| {
        ((MM_MARGIN + 2) as f64 * cfg.target_spacing[a] / vol.grid.spacing[a]).ceil() as usize
    });
    let (vol, mask) = crop_to_voi(vol, mask, margin)?;
    let (vol, mask) = resample_isotropic(&vol, &mask, cfg.target_spacing)?;
    if mask.is_empty_voi() {
        return Err(Error::EmptyVoi);
    }
    let disc = discretize(&vol, &mask, cfg.bin_policy)?;
    let mut out = classical_features(&vol, &mask, &disc)?;
    out.extend(mm_feature_block(&vol, &mask, cfg.bin_policy)?);
    assert_eq!(out.len(), EXTRACTED_FEATURE_COUNT, "49 + 1,540 features");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatientStatus {
    pub patient_id: String,
    /// `None` on success.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutput {
    /// Successful patients only, in manifest order.
    pub table: FeatureTable,
    /// Every manifest patient, in manifest order.
    pub status: Vec<PatientStatus>,
}

/// Extracts every manifest patient in parallel. A failing patient is logged
/// and skipped; the stage fails only if no patient succeeds.
pub fn run_extract(manifest: &CohortManifest, cfg: &RunConfig) -> Result<ExtractOutput> {
    cfg.validate()?;
    if manifest.rows.is_empty() {
        return Err(Error::Manifest("manifest has no patients".into()));
    }
    let results: Vec<Result<Vec<Option<f64>>>> = cfg.install(|| {
        manifest
            .rows
            .par_iter()
            .map(|row| {
                let vol = load_volume(manifest.resolve(&row.volume_path))?;
                let mask = load_mask(manifest.resolve(&row.mask_path))?;
                let feats = extract_patient(&vol, &mask, cfg)?;
                Ok(feats.into_iter().map(|(_, v)| v).collect())
            })
            .collect()
    })?;
    let mut patients = Vec::new();
    let mut values = Vec::new();
    let mut status = Vec::new();
    for (row, res) in manifest.rows.iter().zip(results) {
        let id = row.record.patient_id.clone();
        match res {
            Ok(v) => {
                patients.push(id.clone());
                values.push(v);
                status.push(PatientStatus {
                    patient_id: id,
                    error: None,
                });
            }
            Err(e) => {
                log::warn!("patient {id}: extraction failed: {e}");
                status.push(PatientStatus {
                    patient_id: id,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    if patients.is_empty() {
        return Err(Error::Analysis(format!(
            "extraction failed for all {} patients",
            manifest.rows.len()
        )));
    }
    log::info!("extracted {} of {} patients", patients.len(), manifest.rows.len());
    let table = FeatureTable::new(patients, extracted_feature_names(), values)?;
    Ok(ExtractOutput { table, status })
}

pub fn write_status<W: Write>(status: &[PatientStatus], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["patient_id", "status", "message"])?;
    for s in status {
        let (st, msg) = match &s.error {
            None => ("ok", ""),
            Some(m) => ("failed", m.as_str()),
        };
        w.write_record([s.patient_id.as_str(), st, msg])?;
    }
    w.flush().map_err(|e| Error::io("<status>", e))?;
    Ok(())
}

/// Writes `features.csv` and `extract_status.csv` into `out`.
pub fn write_extract(out: &Path, result: &ExtractOutput) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    result.table.write_csv_file(out.join(FEATURES_FILE))?;
    let p = out.join(STATUS_FILE);
    let f = std::fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
    write_status(&result.status, std::io::BufWriter::new(f))
}
