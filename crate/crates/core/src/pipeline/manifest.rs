use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::stats::{format_real, SurvivalRecord};

/// Exact manifest header.
pub const MANIFEST_HEADER: [&str; 9] = [
    "patient_id",
    "volume_path",
    "mask_path",
    "os_months",
    "event",
    "age",
    "gender",
    "tnm",
    "histology",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub record: SurvivalRecord,
    /// As written in the manifest; relative paths resolve against the
    /// manifest's directory.
    pub volume_path: PathBuf,
    pub mask_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortManifest {
    pub rows: Vec<ManifestRow>,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

impl CohortManifest {
    pub fn records(&self) -> Vec<SurvivalRecord> {
        self.rows.iter().map(|r| r.record.clone()).collect()
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::read(file, base_dir)
    }

    pub fn read<R: Read>(reader: R, base_dir: PathBuf) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != MANIFEST_HEADER {
            return Err(Error::Manifest(format!(
                "header must be `{}`, got `{}`",
                MANIFEST_HEADER.join(","),
                header.join(",")
            )));
        }
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let field = |k: usize| rec.get(k).unwrap_or("").trim();
            let id = field(0);
            if id.is_empty() {
                return Err(Error::Manifest(format!("line {line}: empty patient_id")));
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::Manifest(format!("line {line}: duplicate patient_id {id}")));
            }
            let os: f64 = field(3).parse().map_err(|_| {
                Error::Manifest(format!("line {line}: bad os_months `{}`", field(3)))
            })?;
            let event = match field(4) {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Manifest(format!(
                        "line {line}: event must be 0 or 1, got `{other}`"
                    )))
                }
            };
            let mut record = SurvivalRecord::new(id, os, event)
                .map_err(|e| Error::Manifest(format!("line {line}: {e}")))?;
            record.age = match field(5) {
                "" => None,
                s => Some(s.parse().ok().filter(|a: &f64| a.is_finite()).ok_or_else(|| {
                    Error::Manifest(format!("line {line}: bad age `{s}`"))
                })?),
            };
            let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
            record.gender = opt(field(6));
            record.tnm = opt(field(7));
            record.histology = opt(field(8));
            if field(1).is_empty() || field(2).is_empty() {
                return Err(Error::Manifest(format!("line {line}: missing volume or mask path")));
            }
            rows.push(ManifestRow {
                record,
                volume_path: PathBuf::from(field(1)),
                mask_path: PathBuf::from(field(2)),
            });
        }
        if rows.is_empty() {
            return Err(Error::Manifest("manifest has no patients".into()));
        }
        Ok(CohortManifest { rows, base_dir })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(MANIFEST_HEADER)?;
        for row in &self.rows {
            let r = &row.record;
            w.write_record([
                r.patient_id.clone(),
                row.volume_path.to_string_lossy().into_owned(),
                row.mask_path.to_string_lossy().into_owned(),
                format_real(r.os_months),
                if r.event { "1" } else { "0" }.to_string(),
                r.age.map(format_real).unwrap_or_default(),
                r.gender.clone().unwrap_or_default(),
                r.tnm.clone().unwrap_or_default(),
                r.histology.clone().unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<manifest>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(file))
    }

    /// Fails on the first referenced file that does not exist.
    pub fn check_files(&self) -> Result<()> {
        for row in &self.rows {
            for p in [&row.volume_path, &row.mask_path] {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(Error::Manifest(format!(
                        "patient {}: file not found: {}",
                        row.record.patient_id,
                        full.display()
                    )));
                }
            }
        }
        Ok(())
    }
}
