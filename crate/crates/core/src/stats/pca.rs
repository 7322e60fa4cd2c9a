use serde::{Deserialize, Serialize};

use super::linalg::symmetric_eigen;
use super::table::FeatureTable;
use crate::error::{Error, Result};

/// A fitted principal component model over one metric's series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// Column-name prefix, e.g. `MM.gran.volume`.
    pub metric: String,
    /// Input column names, length `L`.
    pub inputs: Vec<String>,
    pub mean: Vec<f64>,
    /// Population standard deviation; 1 for zero-variance columns.
    pub scale: Vec<f64>,
    /// `loadings[i][c]`: weight of input `i` in component `c`; `L x k`.
    pub loadings: Vec<Vec<f64>>,
    /// Variance of each retained component's scores, non-increasing.
    pub explained: Vec<f64>,
    /// Sum of all `L` eigenvalues (the total standardized variance).
    pub total_variance: f64,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.explained.len()
    }

    pub fn component_names(&self) -> Vec<String> {
        (1..=self.k()).map(|c| format!("{}.PCA{c}", self.metric)).collect()
    }

    /// Fraction of the total variance carried by each retained component.
    pub fn explained_ratio(&self) -> Vec<Option<f64>> {
        self.explained
            .iter()
            .map(|&e| (self.total_variance > 0.0).then(|| e / self.total_variance))
            .collect()
    }

    /// Scores of one patient row; missing inputs count as the column mean.
    pub fn project(&self, row: &[Option<f64>]) -> Vec<f64> {
        let z: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(i, v)| v.map_or(0.0, |v| (v - self.mean[i]) / self.scale[i]))
            .collect();
        (0..self.k())
            .map(|c| z.iter().zip(&self.loadings).map(|(zi, l)| zi * l[c]).sum())
            .collect()
    }
}

/// Column means and population scales over non-missing entries.
fn moments(table: &FeatureTable) -> (Vec<f64>, Vec<f64>) {
    let l = table.n_features();
    let mut mean = vec![0.0; l];
    let mut scale = vec![1.0; l];
    for j in 0..l {
        let vals: Vec<f64> = table.column(j).into_iter().flatten().collect();
        if vals.is_empty() {
            continue;
        }
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
        mean[j] = m;
        let sd = var.sqrt();
        scale[j] = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
    }
    (mean, scale)
}

/// Standardized data matrix (patients x L), missing entries set to 0.
fn standardize(table: &FeatureTable, mean: &[f64], scale: &[f64]) -> Vec<Vec<f64>> {
    table
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, v)| v.map_or(0.0, |v| (v - mean[i]) / scale[i]))
                .collect()
        })
        .collect()
}

/// Covariance (divisor `n`) of the standardized block, row-major `L x L`.
pub fn standardized_covariance(table: &FeatureTable) -> Vec<f64> {
    let (mean, scale) = moments(table);
    let z = standardize(table, &mean, &scale);
    covariance(&z, table.n_features())
}

fn covariance(z: &[Vec<f64>], l: usize) -> Vec<f64> {
    let n = z.len() as f64;
    let mut c = vec![0.0; l * l];
    for i in 0..l {
        for j in i..l {
            let s: f64 = z.iter().map(|r| r[i] * r[j]).sum::<f64>() / n;
            c[i * l + j] = s;
            c[j * l + i] = s;
        }
    }
    c
}

/// Fits a `k`-component PCA on the z-scored block and projects every patient.
///
/// Each component's sign is fixed so that its largest-magnitude loading is
/// positive (the lower index wins on exact ties).
pub fn pca_fit_project(
    block: &FeatureTable,
    metric: &str,
    k: usize,
) -> Result<(PcaModel, FeatureTable)> {
    let l = block.n_features();
    let n = block.n_patients();
    if k == 0 || k > l {
        return Err(Error::InvalidParameter(format!(
            "cannot keep {k} components of {l} inputs"
        )));
    }
    if n < k + 1 {
        return Err(Error::InsufficientData(format!(
            "PCA with {k} components needs at least {} patients, got {n}",
            k + 1
        )));
    }
    let (mean, scale) = moments(block);
    let z = standardize(block, &mean, &scale);
    let cov = covariance(&z, l);
    let eig = symmetric_eigen(&cov, l);
    let mut loadings = vec![vec![0.0; k]; l];
    for (c, v) in eig.vectors.iter().take(k).enumerate() {
        let mut best = 0;
        for i in 1..l {
            if v[i].abs() > v[best].abs() {
                best = i;
            }
        }
        let sign = if v[best] < 0.0 { -1.0 } else { 1.0 };
        for (row, &x) in loadings.iter_mut().zip(v) {
            row[c] = sign * x + 0.0;
        }
    }
    let model = PcaModel {
        metric: metric.to_string(),
        inputs: block.features().to_vec(),
        mean,
        scale,
        loadings,
        explained: eig.values[..k].iter().map(|&e| e.max(0.0)).collect(),
        total_variance: eig.values.iter().map(|&e| e.max(0.0)).sum(),
    };
    let rows = z
        .iter()
        .map(|zr| {
            (0..k)
                .map(|c| Some(zr.iter().zip(&model.loadings).map(|(a, w)| a * w[c]).sum()))
                .collect()
        })
        .collect();
    let projected = FeatureTable::new(block.patients().to_vec(), model.component_names(), rows)?;
    Ok((model, projected))
}
