use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::analyze::file_stem;
use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::stats::{CategoricalResult, KmStep, Orientation, SurvivalAnalysisRow};

/// Version of the `report.json` layout; see `docs/report-schema.md`.
pub const SCHEMA_VERSION: &str = "1.0.0";
pub const SUMMARY_FILE: &str = "summary.md";
pub const PLOT_DIR: &str = "km_plots";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub n_patients: usize,
    pub n_events: usize,
    /// Rows in the correction family (reduced features plus age).
    pub n_features: usize,
    pub horizon_months: f64,
    pub cutoff_policy: String,
    pub hr_estimator: String,
    pub mean_os: String,
    pub correction_order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub row: SurvivalAnalysisRow,
    pub km_high: Vec<KmStep>,
    pub km_low: Vec<KmStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEntry {
    pub covariate: String,
    pub result: Option<CategoricalResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalSection {
    pub age: SurvivalAnalysisRow,
    pub categorical: Vec<CategoricalEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub metadata: ReportMetadata,
    /// Significant rows, most significant first.
    pub ranked: Vec<RankedEntry>,
    /// Every analyzed feature in table order (age is under `clinical`).
    pub features: Vec<SurvivalAnalysisRow>,
    pub clinical: ClinicalSection,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text)?;
        let major = r.schema_version.split('.').next().unwrap_or("");
        if major != SCHEMA_VERSION.split('.').next().unwrap_or("") {
            return Err(Error::Analysis(format!(
                "unsupported report schema {} (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Months, ratios, Se/Sp/AUC: two decimals.
pub fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Cutoffs: four decimals.
pub fn fmt_cutoff(v: f64) -> String {
    format!("{v:.4}")
}

/// p-values: four decimals, or three significant digits below 0.001.
pub fn fmt_p(p: f64) -> String {
    if p >= 0.001 || p == 0.0 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

fn or_na(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map_or_else(|| "n/a".to_string(), f)
}

fn paragraph(e: &RankedEntry) -> String {
    let r = &e.row;
    let name = &r.feature;
    let cmp = match r.orientation {
        Some(Orientation::LowIsRisk) => "<=",
        _ => ">=",
    };
    let mut s = String::new();
    let _ = writeln!(s, "### {}. {name}\n", e.rank);
    if let (Some(h), Some(l)) = (&r.high, &r.low) {
        let _ = writeln!(
            s,
            "Patients with {name} {cmp} {} (high-risk group, n = {}, {} deaths) have a mean OS of \
             {} months (CI: {}-{}) and a median OS of {} months. The other patients (n = {}, {} \
             deaths) have a mean OS of {} months (CI: {}-{}) and a median OS of {} months.\n",
            or_na(r.cutoff, fmt_cutoff),
            h.n,
            h.deaths,
            fmt2(h.mean_os),
            fmt2(h.mean_os_lower),
            fmt2(h.mean_os_upper),
            or_na(h.median_os, fmt2),
            l.n,
            l.deaths,
            fmt2(l.mean_os),
            fmt2(l.mean_os_lower),
            fmt2(l.mean_os_upper),
            or_na(l.median_os, fmt2),
        );
    }
    let _ = writeln!(
        s,
        "HR = {} ({}-{}), Se = {}, Sp = {}, AUC = {}. p (log-rank) = {}, p (Altman) = {}, \
         p (BH) = {}.\n",
        or_na(r.hr, fmt2),
        or_na(r.hr_lower, fmt2),
        or_na(r.hr_upper, fmt2),
        or_na(r.se, fmt2),
        or_na(r.sp, fmt2),
        or_na(r.auc, fmt2),
        or_na(r.p_logrank, fmt_p),
        or_na(r.p_altman, fmt_p),
        or_na(r.p_bh, fmt_p),
    );
    let _ = writeln!(s, "Kaplan-Meier plot: `{PLOT_DIR}/{}.svg`\n", file_stem(name));
    s
}

/// Markdown summary: one paragraph per significant feature, then the
/// clinical covariates.
pub fn render_summary(report: &Report) -> String {
    let m = &report.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "# Prognostic feature report\n");
    let _ = writeln!(
        s,
        "{} patients, {} deaths. {} features tested; a feature is significant when its \
         Benjamini-Hochberg adjusted, Altman corrected log-rank p is below {}.\n",
        m.n_patients, m.n_events, m.n_features, m.config.alpha
    );
    let _ = writeln!(
        s,
        "Months, HR, Se, Sp and AUC use two decimals, cutoffs four, and p-values four decimals \
         or three significant digits below 0.001.\n"
    );
    let _ = writeln!(s, "## Significant features\n");
    if report.ranked.is_empty() {
        let _ = writeln!(s, "Result: no significant features (alpha = {}).\n", m.config.alpha);
    }
    for e in &report.ranked {
        s.push_str(&paragraph(e));
    }
    let _ = writeln!(s, "## Clinical covariates\n");
    let age = &report.clinical.age;
    if age.evaluable {
        let _ = writeln!(
            s,
            "- age: cutoff {} years, HR = {}, p (log-rank) = {}, p (BH) = {}",
            or_na(age.cutoff, fmt_cutoff),
            or_na(age.hr, fmt2),
            or_na(age.p_logrank, fmt_p),
            or_na(age.p_bh, fmt_p),
        );
    } else {
        let _ = writeln!(s, "- age: not evaluable ({})", age.note.as_deref().unwrap_or("no data"));
    }
    for c in &report.clinical.categorical {
        match &c.result {
            Some(r) => {
                let _ = writeln!(
                    s,
                    "- {}: {} categories, log-rank p = {}",
                    c.covariate,
                    r.categories.len(),
                    fmt_p(r.p)
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "- {}: not evaluable ({})",
                    c.covariate,
                    c.note.as_deref().unwrap_or("no data")
                );
            }
        }
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Kaplan-Meier step plot of both groups with censoring ticks.
pub fn render_km_svg(title: &str, high: &[KmStep], low: &[KmStep]) -> String {
    let tmax = high
        .iter()
        .chain(low)
        .map(|s| s.time)
        .fold(0.0f64, f64::max)
        .max(1.0);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let x = |t: f64| LEFT + pw * t / tmax;
    let y = |s: f64| TOP + ph * (1.0 - s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        y(0.0),
        x(tmax),
        y(0.0)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT}" y1="{:.2}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        y(0.0),
        y(1.0)
    );
    for k in 0..=4 {
        let s = k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{s:.2}</text>"#,
            LEFT - 6.0,
            y(s) + 4.0
        );
        let t = tmax * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{t:.1}</text>"#,
            x(t),
            y(0.0) + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">Overall survival (months)</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );
    for (group, steps, color) in [("high", high, "#c0392b"), ("low", low, "#2471a3")] {
        let mut d = format!("M{:.2},{:.2}", x(0.0), y(1.0));
        for st in steps {
            let _ = write!(d, " H{:.2} V{:.2}", x(st.time), y(st.survival));
        }
        let _ = writeln!(
            out,
            r#"<path class="km {group}" d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
        for st in steps.iter().filter(|s| s.censored > 0) {
            let (cx, cy) = (x(st.time), y(st.survival));
            let _ = writeln!(
                out,
                r#"<line class="censor {group}" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#,
                cy - 5.0,
                cy + 5.0
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="18" font-size="12" fill="#c0392b">high risk</text>"##,
        W - RIGHT - 150.0
    );
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="18" font-size="12" fill="#2471a3">low risk</text>"##,
        W - RIGHT - 70.0
    );
    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `summary.md` and one SVG per ranked feature into `out`.
pub fn write_report(out: &Path, report: &Report) -> Result<()> {
    let plots = out.join(PLOT_DIR);
    std::fs::create_dir_all(&plots).map_err(|e| Error::io(&plots, e))?;
    let p = out.join(SUMMARY_FILE);
    std::fs::write(&p, render_summary(report)).map_err(|e| Error::io(&p, e))?;
    for e in &report.ranked {
        let svg = render_km_svg(&e.row.feature, &e.km_high, &e.km_low);
        let p = plots.join(format!("{}.svg", file_stem(&e.row.feature)));
        std::fs::write(&p, svg).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}
