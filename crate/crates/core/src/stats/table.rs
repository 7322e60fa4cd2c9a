use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Patients x named features; `None` is a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    patients: Vec<String>,
    features: Vec<String>,
    /// Row-major, one row per patient.
    values: Vec<Vec<Option<f64>>>,
}

/// Formats a real so that parsing it back yields the same bits.
pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

impl FeatureTable {
    pub fn new(
        patients: Vec<String>,
        features: Vec<String>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        check_unique(&patients, "patient id")?;
        check_unique(&features, "feature name")?;
        if values.len() != patients.len() {
            return Err(Error::Table(format!(
                "{} rows for {} patients",
                values.len(),
                patients.len()
            )));
        }
        if let Some((i, row)) = values.iter().enumerate().find(|(_, r)| r.len() != features.len()) {
            return Err(Error::Table(format!(
                "row {} ({}) has {} values, expected {}",
                i,
                patients[i],
                row.len(),
                features.len()
            )));
        }
        if values.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite value in feature table".into()));
        }
        Ok(FeatureTable {
            patients,
            features,
            values,
        })
    }

    pub fn patients(&self) -> &[String] {
        &self.patients
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn n_patients(&self) -> usize {
        self.patients.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn get(&self, patient: usize, feature: usize) -> Option<f64> {
        self.values[patient][feature]
    }

    pub fn column(&self, feature: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|r| r[feature]).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<Option<f64>>> {
        self.feature_index(name).map(|i| self.column(i))
    }

    /// Columns in the given order.
    pub fn select(&self, names: &[String]) -> Result<FeatureTable> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_index(n)
                    .ok_or_else(|| Error::Table(format!("missing feature column {n}")))
            })
            .collect::<Result<_>>()?;
        let values = self
            .values
            .iter()
            .map(|r| idx.iter().map(|&i| r[i]).collect())
            .collect();
        FeatureTable::new(self.patients.clone(), names.to_vec(), values)
    }

    /// Side-by-side concatenation; patients must match in order.
    pub fn hstack(&self, other: &FeatureTable) -> Result<FeatureTable> {
        if self.patients != other.patients {
            return Err(Error::Table("cannot join tables with different patients".into()));
        }
        let mut features = self.features.clone();
        features.extend(other.features.iter().cloned());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        FeatureTable::new(self.patients.clone(), features, values)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = Vec::with_capacity(self.features.len() + 1);
        header.push("patient_id");
        header.extend(self.features.iter().map(String::as_str));
        wr.write_record(&header)?;
        for (p, row) in self.patients.iter().zip(&self.values) {
            let mut rec = Vec::with_capacity(row.len() + 1);
            rec.push(p.clone());
            rec.extend(row.iter().map(|v| v.map(format_real).unwrap_or_default()));
            wr.write_record(&rec)?;
        }
        wr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<FeatureTable> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        if header.get(0) != Some("patient_id") {
            return Err(Error::Table("first column must be patient_id".into()));
        }
        let features: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut patients = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            patients.push(rec.get(0).unwrap_or_default().to_string());
            let row = rec
                .iter()
                .skip(1)
                .map(|s| {
                    if s.is_empty() {
                        Ok(None)
                    } else {
                        s.parse::<f64>().map(Some).map_err(|_| {
                            Error::Table(format!("row {}: cannot parse {s:?}", line + 2))
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        FeatureTable::new(patients, features, values)
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<FeatureTable> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        FeatureTable::read_csv(std::io::BufReader::new(f))
    }
}

fn check_unique(items: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(items.len());
    for it in items {
        if !seen.insert(it.as_str()) {
            return Err(Error::Table(format!("duplicate {what} {it:?}")));
        }
    }
    Ok(())
}
