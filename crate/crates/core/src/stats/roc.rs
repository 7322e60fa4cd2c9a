use serde::{Deserialize, Serialize};

use super::spearman::mid_ranks;
use crate::error::{Error, Result};

/// Which side of the cutoff is the predicted-death (high-risk) group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Values `>= cutoff` are high-risk.
    HighIsRisk,
    /// Values `<= cutoff` are high-risk.
    LowIsRisk,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::HighIsRisk => Orientation::LowIsRisk,
            Orientation::LowIsRisk => Orientation::HighIsRisk,
        }
    }

    pub fn is_high_risk(self, value: f64, cutoff: f64) -> bool {
        match self {
            Orientation::HighIsRisk => value >= cutoff,
            Orientation::LowIsRisk => value <= cutoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    /// Area under the curve under `orientation`, always `>= 0.5`.
    pub auc: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub cutoff: f64,
    pub orientation: Orientation,
}

/// Probability that a positive outranks a negative, ties counting one half.
pub fn auc(values: &[f64], labels: &[bool]) -> Result<f64> {
    let (p, n) = class_sizes(labels)?;
    let ranks = mid_ranks(values);
    let r_pos: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let u = r_pos - (p * (p + 1)) as f64 / 2.0;
    Ok(u / (p as f64 * n as f64))
}

fn class_sizes(labels: &[bool]) -> Result<(usize, usize)> {
    let p = labels.iter().filter(|&&l| l).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::InsufficientData(
            "ROC analysis needs both label classes".into(),
        ));
    }
    Ok((p, n))
}

/// Percentile with linear interpolation between order statistics
/// (`q = 0` is the minimum, `q = 1` the maximum).
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// ROC analysis with the cutoff searched over every midpoint.
pub fn roc_analysis(values: &[f64], labels: &[bool]) -> Result<RocResult> {
    roc_analysis_within(values, labels, 0.0, 1.0)
}

/// ROC analysis with candidate cutoffs restricted to the inclusive range
/// between the `q_lo` and `q_hi` percentiles of `values`.
///
/// The cutoff maximizes Youden's J; ties go to the split whose group sizes
/// are closest, then to the smaller cutoff.
pub fn roc_analysis_within(
    values: &[f64],
    labels: &[bool],
    q_lo: f64,
    q_hi: f64,
) -> Result<RocResult> {
    if values.len() != labels.len() {
        return Err(Error::InvalidParameter("values and labels differ in length".into()));
    }
    let (p, n) = class_sizes(labels)?;
    let raw = auc(values, labels)?;
    let (auc, orientation) = if raw >= 0.5 {
        (raw, Orientation::HighIsRisk)
    } else {
        (1.0 - raw, Orientation::LowIsRisk)
    };
    let lo = percentile(values, q_lo);
    let hi = percentile(values, q_hi);
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut best: Option<(f64, usize, f64, f64, f64)> = None;
    for w in distinct.windows(2) {
        let c = w[0] + (w[1] - w[0]) / 2.0;
        if c < lo || c > hi {
            continue;
        }
        let (mut tp, mut tn, mut high) = (0usize, 0usize, 0usize);
        for (&v, &l) in values.iter().zip(labels) {
            let risk = orientation.is_high_risk(v, c);
            high += usize::from(risk);
            if risk && l {
                tp += 1;
            }
            if !risk && !l {
                tn += 1;
            }
        }
        let se = tp as f64 / p as f64;
        let sp = tn as f64 / n as f64;
        let j = se + sp - 1.0;
        let imbalance = high.abs_diff(values.len() - high);
        let better = match best {
            None => true,
            Some((bj, bimb, ..)) => j > bj || (j == bj && imbalance < bimb),
        };
        if better {
            best = Some((j, imbalance, c, se, sp));
        }
    }
    let (_, _, cutoff, sensitivity, specificity) = best.ok_or_else(|| {
        Error::InsufficientData("no candidate cutoff inside the search interval".into())
    })?;
    Ok(RocResult {
        auc,
        sensitivity,
        specificity,
        cutoff,
        orientation,
    })
}
