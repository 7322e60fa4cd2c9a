use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::corrections::{altman_correct_with, bh_adjust, AltmanConstants};
use super::km::km_estimate;
use super::logrank::{hazard_ratio, logrank_k, logrank_test};
use super::roc::{auc, roc_analysis_within, Orientation};
use super::table::FeatureTable;
use super::Observation;
use crate::error::{Error, Result};
use crate::features::CLASSICAL_FEATURE_COUNT;
use crate::morphology::METRICS;

/// Survival horizon for the binary ROC label, in months.
pub const HORIZON_MONTHS: f64 = 24.0;

/// Follow-up and clinical covariates of one patient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub patient_id: String,
    pub os_months: f64,
    /// `true` when the patient died; censored patients are `false`.
    pub event: bool,
    pub age: Option<f64>,
    pub gender: Option<String>,
    pub tnm: Option<String>,
    pub histology: Option<String>,
}

impl SurvivalRecord {
    pub fn new(patient_id: impl Into<String>, os_months: f64, event: bool) -> Result<Self> {
        let patient_id = patient_id.into();
        if !(os_months >= 0.0) || !os_months.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "patient {patient_id}: os_months must be a non-negative number, got {os_months}"
            )));
        }
        Ok(SurvivalRecord {
            patient_id,
            os_months,
            event,
            age: None,
            gender: None,
            tnm: None,
            histology: None,
        })
    }

    pub fn observation(&self) -> Observation {
        Observation {
            time: self.os_months,
            event: self.event,
        }
    }
}

/// Dead within the horizon. Censored patients count as alive whatever their
/// follow-up.
pub fn two_year_label(records: &[SurvivalRecord]) -> Vec<bool> {
    records
        .iter()
        .map(|r| r.event && r.os_months <= HORIZON_MONTHS)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    /// Percentile bounds of the cutoff search.
    pub cutoff_interval: [f64; 2],
    pub altman: AltmanConstants,
    pub alpha: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            cutoff_interval: [0.1, 0.9],
            altman: AltmanConstants::default(),
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub deaths: usize,
    pub median_os: Option<f64>,
    /// Restricted mean survival time in months.
    pub mean_os: f64,
    pub mean_os_lower: f64,
    pub mean_os_upper: f64,
}

impl GroupSummary {
    fn of(obs: &[Observation]) -> Result<Self> {
        let k = km_estimate(obs)?;
        Ok(GroupSummary {
            n: k.n,
            deaths: k.deaths,
            median_os: k.median,
            mean_os: k.rmst,
            mean_os_lower: k.rmst_ci.0,
            mean_os_upper: k.rmst_ci.1,
        })
    }
}

/// Outcome of analyzing one feature against survival.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalAnalysisRow {
    pub feature: String,
    pub evaluable: bool,
    /// Why the row is not evaluable, or a diagnostic for an evaluable one.
    pub note: Option<String>,
    /// Patients with a value for this feature.
    pub n: usize,
    pub n_missing: usize,
    pub orientation: Option<Orientation>,
    pub cutoff: Option<f64>,
    pub se: Option<f64>,
    pub sp: Option<f64>,
    pub auc: Option<f64>,
    pub hr: Option<f64>,
    pub hr_lower: Option<f64>,
    pub hr_upper: Option<f64>,
    pub logrank_statistic: Option<f64>,
    pub p_logrank: Option<f64>,
    pub p_altman: Option<f64>,
    pub altman_flagged: bool,
    pub p_bh: Option<f64>,
    pub high: Option<GroupSummary>,
    pub low: Option<GroupSummary>,
}

impl SurvivalAnalysisRow {
    fn not_evaluable(feature: &str, n: usize, n_missing: usize, why: impl Into<String>) -> Self {
        SurvivalAnalysisRow {
            feature: feature.to_string(),
            evaluable: false,
            note: Some(why.into()),
            n,
            n_missing,
            orientation: None,
            cutoff: None,
            se: None,
            sp: None,
            auc: None,
            hr: None,
            hr_lower: None,
            hr_upper: None,
            logrank_statistic: None,
            p_logrank: None,
            p_altman: None,
            altman_flagged: false,
            p_bh: None,
            high: None,
            low: None,
        }
    }
}

/// Splits patients with a value into (high-risk, low-risk) observations.
pub fn split_groups(
    values: &[Option<f64>],
    records: &[SurvivalRecord],
    orientation: Orientation,
    cutoff: f64,
) -> (Vec<Observation>, Vec<Observation>) {
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (v, r) in values.iter().zip(records) {
        if let Some(v) = v {
            if orientation.is_high_risk(*v, cutoff) {
                high.push(r.observation());
            } else {
                low.push(r.observation());
            }
        }
    }
    (high, low)
}

/// ROC cutoff on the two-year label, then Kaplan-Meier, log-rank and hazard
/// ratio on the dichotomized groups. The high-risk group is the one with the
/// larger observed-to-expected death ratio, so a defined HR is at least 1.
pub fn analyze_feature(
    name: &str,
    values: &[Option<f64>],
    records: &[SurvivalRecord],
    cfg: &AnalysisConfig,
) -> SurvivalAnalysisRow {
    assert_eq!(values.len(), records.len(), "one value per record");
    let (vals, recs): (Vec<f64>, Vec<SurvivalRecord>) = values
        .iter()
        .zip(records)
        .filter_map(|(v, r)| v.map(|v| (v, r.clone())))
        .unzip();
    let n = vals.len();
    let n_missing = values.len() - n;
    let ne = |why: String| SurvivalAnalysisRow::not_evaluable(name, n, n_missing, why);
    if n < 2 {
        return ne(format!("only {n} patients with a value"));
    }
    if vals.iter().all(|&v| v == vals[0]) {
        return ne("constant feature".into());
    }
    let labels = two_year_label(&recs);
    let roc = match roc_analysis_within(&vals, &labels, cfg.cutoff_interval[0], cfg.cutoff_interval[1]) {
        Ok(r) => r,
        Err(e) => return ne(e.to_string()),
    };
    let mut orientation = roc.orientation;
    let present: Vec<Option<f64>> = vals.iter().map(|&v| Some(v)).collect();
    let (mut high, mut low) = split_groups(&present, &recs, orientation, roc.cutoff);
    if high.is_empty() || low.is_empty() {
        return ne("dichotomization left a group empty".into());
    }
    let lr = match logrank_test(&high, &low) {
        Ok(lr) => lr,
        Err(e) => return ne(e.to_string()),
    };
    let mut note = None;
    if lr.observed[0] * lr.expected[1] < lr.observed[1] * lr.expected[0] {
        orientation = orientation.flipped();
        std::mem::swap(&mut high, &mut low);
        note = Some("orientation reversed to the worse-survival group".to_string());
    }
    if lr.flagged {
        note = Some("no deaths among patients with a value".to_string());
    }
    let (mut tp, mut tn) = (0usize, 0usize);
    for (&v, &l) in vals.iter().zip(&labels) {
        let risk = orientation.is_high_risk(v, roc.cutoff);
        tp += usize::from(risk && l);
        tn += usize::from(!risk && !l);
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let auc_value = if orientation == roc.orientation {
        roc.auc
    } else {
        1.0 - roc.auc
    };
    debug_assert_eq!(auc(&vals, &labels).ok().map(|a| a.max(1.0 - a)), Some(roc.auc));
    let hr = hazard_ratio(&high, &low);
    let altman = altman_correct_with(lr.p, cfg.altman);
    SurvivalAnalysisRow {
        feature: name.to_string(),
        evaluable: true,
        note,
        n,
        n_missing,
        orientation: Some(orientation),
        cutoff: Some(roc.cutoff),
        se: Some(tp as f64 / pos as f64),
        sp: Some(tn as f64 / (n - pos) as f64),
        auc: Some(auc_value),
        hr: hr.map(|h| h.hr),
        hr_lower: hr.map(|h| h.lower),
        hr_upper: hr.map(|h| h.upper),
        logrank_statistic: Some(lr.statistic),
        p_logrank: Some(lr.p),
        p_altman: Some(altman.p),
        altman_flagged: altman.flagged,
        p_bh: None,
        high: GroupSummary::of(&high).ok(),
        low: GroupSummary::of(&low).ok(),
    }
}

/// Fills `p_bh` over all evaluable rows, then returns the rows with
/// `p_bh < alpha` ordered by increasing p.
pub fn rank_features(rows: &mut [SurvivalAnalysisRow], alpha: f64) -> Vec<SurvivalAnalysisRow> {
    let p: Vec<Option<f64>> = rows
        .iter()
        .map(|r| if r.evaluable { r.p_altman } else { None })
        .collect();
    for (row, adj) in rows.iter_mut().zip(bh_adjust(&p)) {
        row.p_bh = adj;
    }
    let mut ranked: Vec<SurvivalAnalysisRow> = rows
        .iter()
        .filter(|r| r.p_bh.is_some_and(|p| p < alpha))
        .cloned()
        .collect();
    let key = |x: Option<f64>| x.unwrap_or(f64::INFINITY);
    ranked.sort_by(|a, b| {
        key(a.p_bh)
            .total_cmp(&key(b.p_bh))
            .then(key(a.p_altman).total_cmp(&key(b.p_altman)))
            .then(key(a.p_logrank).total_cmp(&key(b.p_logrank)))
            .then(a.feature.cmp(&b.feature))
    });
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: String,
    pub n: usize,
    pub deaths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalResult {
    /// Categories in lexical order.
    pub categories: Vec<CategoryCount>,
    pub statistic: f64,
    pub df: usize,
    pub p: f64,
    pub flagged: bool,
}

/// k-group log-rank test across the categories of a covariate; patients with
/// no category are left out.
pub fn analyze_categorical(
    labels: &[Option<String>],
    records: &[SurvivalRecord],
) -> Result<CategoricalResult> {
    let mut groups: BTreeMap<&str, Vec<Observation>> = BTreeMap::new();
    for (l, r) in labels.iter().zip(records) {
        if let Some(l) = l {
            groups.entry(l.as_str()).or_default().push(r.observation());
        }
    }
    if groups.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "categorical analysis needs at least 2 categories, got {}",
            groups.len()
        )));
    }
    let slices: Vec<&[Observation]> = groups.values().map(Vec::as_slice).collect();
    let lr = logrank_k(&slices)?;
    Ok(CategoricalResult {
        categories: groups
            .iter()
            .map(|(k, v)| CategoryCount {
                category: k.to_string(),
                n: v.len(),
                deaths: v.iter().filter(|o| o.event).count(),
            })
            .collect(),
        statistic: lr.statistic,
        df: lr.df,
        p: lr.p,
        flagged: lr.flagged,
    })
}

/// Classical features followed by the projected morphological blocks, one
/// block per metric and series kind.
pub fn build_reduced_table(cr: &FeatureTable, mm_projected: &[FeatureTable]) -> Result<FeatureTable> {
    if cr.n_features() != CLASSICAL_FEATURE_COUNT {
        return Err(Error::Table(format!(
            "expected {CLASSICAL_FEATURE_COUNT} classical columns, got {}",
            cr.n_features()
        )));
    }
    let blocks = 2 * METRICS.len();
    if mm_projected.len() != blocks {
        return Err(Error::Table(format!(
            "expected {blocks} projected blocks, got {}",
            mm_projected.len()
        )));
    }
    let k = mm_projected[0].n_features();
    if mm_projected.iter().any(|b| b.n_features() != k) {
        return Err(Error::Table("projected blocks differ in component count".into()));
    }
    let mut out = cr.clone();
    for b in mm_projected {
        out = out.hstack(b)?;
    }
    debug_assert_eq!(out.n_features(), CLASSICAL_FEATURE_COUNT + blocks * k);
    Ok(out)
}
